#include "boltzfold/structure_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>

#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"

namespace boltzfold {

const char* face_type_name(FaceType t) {
    switch (t) {
        case FaceType::STACK: return "STACK";
        case FaceType::HAIRPIN: return "HAIRPIN";
        case FaceType::INTERNAL: return "INTERNAL";
        case FaceType::BULGE: return "BULGE";
        case FaceType::MULTIBRANCH: return "MULTI";
    }
    return "?";
}

StructureGraph build_graph(const Sequence& seq, const SecondaryStructure& structure) {
    if (seq.length() != structure.length())
        throw ValidationError("sequence length " + std::to_string(seq.length()) +
                              " does not match structure length " +
                              std::to_string(structure.length()));
    return StructureGraph{seq, structure};
}

FaceType classify_face(const std::pair<int, int>& defining_pair,
                       const std::vector<std::pair<int, int>>& nested_pairs) {
    auto [i, j] = defining_pair;
    if (nested_pairs.empty()) return FaceType::HAIRPIN;
    if (nested_pairs.size() >= 2) return FaceType::MULTIBRANCH;
    auto [k, l] = nested_pairs.front();
    int left = k - i - 1;
    int right = j - l - 1;
    if (left == 0 && right == 0) return FaceType::STACK;
    if (left == 0 || right == 0) return FaceType::BULGE;
    return FaceType::INTERNAL;
}

namespace {

Face make_face(const StructureGraph& graph, int i, int j) {
    const SecondaryStructure& s = graph.structure;
    Face face;
    face.defining_pair = {i, j};
    for (int k = i + 1; k < j;) {
        if (s.paired(k)) {
            face.nested_pairs.emplace_back(k, s.partner(k));
            k = s.partner(k) + 1;
        } else {
            ++k;
        }
    }
    face.face_type = classify_face(face.defining_pair, face.nested_pairs);
    switch (face.face_type) {
        case FaceType::HAIRPIN:
            face.unpaired_lengths = {j - i - 1};
            break;
        case FaceType::STACK:
            break;
        case FaceType::BULGE: {
            auto [k, l] = face.nested_pairs.front();
            face.unpaired_lengths = {std::max(k - i - 1, j - l - 1)};
            break;
        }
        case FaceType::INTERNAL: {
            auto [k, l] = face.nested_pairs.front();
            face.unpaired_lengths = {k - i - 1, j - l - 1};
            break;
        }
        case FaceType::MULTIBRANCH: {
            int covered = 0;
            for (auto [k, l] : face.nested_pairs) covered += l - k + 1;
            face.unpaired_lengths = {j - i - 1 - covered};
            break;
        }
    }
    return face;
}

}  // namespace

std::vector<Face> extract_faces(const StructureGraph& graph, const EnergyParameters& params) {
    std::vector<Face> faces;
    for (auto [i, j] : graph.structure.pairs()) {
        Face face = make_face(graph, i, j);
        face.energy = face_energy(face, graph.seq, params);
        face.label_key = face_label_key(face, graph.seq);
        faces.push_back(std::move(face));
    }
    return faces;
}

namespace {

std::string lengths_part(const Face& face) {
    switch (face.face_type) {
        case FaceType::STACK: return "";
        case FaceType::HAIRPIN:
        case FaceType::BULGE: return std::to_string(face.unpaired_lengths.at(0));
        case FaceType::INTERNAL:
            return std::to_string(face.unpaired_lengths.at(0)) + "+" +
                   std::to_string(face.unpaired_lengths.at(1));
        case FaceType::MULTIBRANCH:
            return std::to_string(face.branches()) + "+" +
                   std::to_string(face.unpaired_lengths.at(0));
    }
    return "";
}

}  // namespace

std::string face_label_key(const Face& face, const Sequence& seq) {
    std::string key = face_type_name(face.face_type);
    std::string lens = lengths_part(face);
    if (!lens.empty()) key += ":" + lens;
    if (face.face_type == FaceType::MULTIBRANCH) return key;

    auto [i, j] = face.defining_pair;
    std::string nts{seq.bases[i], seq.bases[j]};
    if (face.face_type != FaceType::HAIRPIN) {
        auto [k, l] = face.nested_pairs.front();
        nts += std::string{'/', seq.bases[k], seq.bases[l]};
    }
    return key + ":" + nts;
}

std::string face_energy_key(const Face& face) {
    // Energy rounded to 0.1 kcal/mol so float noise cannot fragment the
    // dictionary.
    double e = std::round(face.energy * 10.0) / 10.0;
    if (e == 0.0) e = 0.0;  // fold -0.0 into +0.0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.1f", e);
    std::string key = face_type_name(face.face_type);
    std::string lens = lengths_part(face);
    if (!lens.empty()) key += ":" + lens;
    return key + "@" + buf;
}

MotzkinVector motzkin_path(const SecondaryStructure& structure) {
    MotzkinVector m;
    m.y_values.reserve(structure.length());
    int y = 0;
    for (int i = 0; i < structure.length(); ++i) {
        int p = structure.partner(i);
        if (p != SecondaryStructure::UNPAIRED) y += p > i ? 1 : -1;
        m.y_values.push_back(y);
    }
    return m;
}

namespace {

// Canonical code of a small rooted edge-labeled graph: the minimal
// adjacency-column string over all root-first placements, found by
// backtracking over tied candidates.
class Canonicalizer {
  public:
    Canonicalizer(const std::vector<std::vector<int>>& lab, int root)
        : lab_(lab), n_(static_cast<int>(lab.size())), placed_(), pos_(lab.size(), -1) {
        placed_.reserve(n_);
        place(root);
        code_.reserve(static_cast<std::size_t>(n_) * (n_ + 1));
        search();
    }

    std::string result() && { return std::move(best_); }

  private:
    void place(int v) {
        pos_[v] = static_cast<int>(placed_.size());
        placed_.push_back(v);
    }
    void unplace() {
        pos_[placed_.back()] = -1;
        placed_.pop_back();
    }

    std::string column(int v) const {
        std::string col;
        col.reserve(placed_.size() + 1);
        for (int p : placed_) col.push_back(static_cast<char>('0' + lab_[v][p]));
        col.push_back('|');
        return col;
    }

    void search() {
        if (static_cast<int>(placed_.size()) == n_) {
            if (best_.empty() || code_ < best_) best_ = code_;
            return;
        }
        // Candidates must touch the placed set; balls are connected, so
        // this always yields at least one vertex.
        std::string min_col;
        std::vector<int> ties;
        for (int v = 0; v < n_; ++v) {
            if (pos_[v] >= 0) continue;
            bool touches = false;
            for (int p : placed_)
                if (lab_[v][p] != 0) {
                    touches = true;
                    break;
                }
            if (!touches) continue;
            std::string col = column(v);
            if (min_col.empty() || col < min_col) {
                min_col = std::move(col);
                ties.assign(1, v);
            } else if (col == min_col) {
                ties.push_back(v);
            }
        }
        std::size_t code_len = code_.size();
        code_ += min_col;
        if (best_.empty() || code_.compare(0, code_.size(), best_, 0, code_.size()) <= 0) {
            for (int v : ties) {
                place(v);
                search();
                unplace();
            }
        }
        code_.resize(code_len);
    }

    const std::vector<std::vector<int>>& lab_;
    int n_;
    std::vector<int> placed_;
    std::vector<int> pos_;
    std::string code_;
    std::string best_;
};

}  // namespace

NeighborhoodKey rooted_neighborhood_key(const StructureGraph& graph, int center, int radius) {
    int n = graph.node_count();
    if (center < 0 || center >= n) throw ValidationError("neighborhood center out of range");
    if (radius < 0) throw ValidationError("neighborhood radius must be >= 0");

    // BFS ball over path + pair edges.
    std::vector<int> dist(n, -1);
    std::deque<int> queue{center};
    dist[center] = 0;
    std::vector<int> ball{center};
    auto visit = [&](int u, int v) {
        if (v >= 0 && v < n && dist[v] < 0 && dist[u] + 1 <= radius) {
            dist[v] = dist[u] + 1;
            queue.push_back(v);
            ball.push_back(v);
        }
    };
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        visit(u, u - 1);
        visit(u, u + 1);
        int p = graph.structure.partner(u);
        if (p != SecondaryStructure::UNPAIRED) visit(u, p);
    }
    std::sort(ball.begin(), ball.end());

    int m = static_cast<int>(ball.size());
    std::map<int, int> local;
    for (int i = 0; i < m; ++i) local[ball[i]] = i;

    // Induced subgraph with edge labels 1 (path) / 2 (pair).
    std::vector<std::vector<int>> lab(m, std::vector<int>(m, 0));
    for (int i = 0; i < m; ++i) {
        int u = ball[i];
        if (local.count(u + 1)) lab[i][local[u + 1]] = lab[local[u + 1]][i] = 1;
        int p = graph.structure.partner(u);
        if (p > u && local.count(p)) lab[i][local[p]] = lab[local[p]][i] = 2;
    }

    std::string code = std::to_string(m) + ";" +
                       Canonicalizer(lab, local.at(center)).result();
    return NeighborhoodKey{std::move(code)};
}

}  // namespace boltzfold
