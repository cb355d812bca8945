#include "boltzfold/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "boltzfold/errors.hpp"

namespace boltzfold {

const char* feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::FACE: return "FACE";
        case FeatureKind::NEIGHBORHOOD: return "NBH";
        case FeatureKind::KMER: return "KMER";
    }
    return "?";
}

void FeatureDictionary::rebuild_index() {
    index.clear();
    for (int i = 0; i < size(); ++i) index[entries[i]] = i;
    if (index.size() != entries.size())
        throw ValidationError("duplicate keys in feature dictionary");
}

int FeatureDictionary::column(const std::string& key) const {
    auto it = index.find(key);
    return it == index.end() ? -1 : it->second;
}

double Fingerprint::sum() const {
    double s = 0.0;
    for (const auto& [c, v] : values) s += v;
    return s;
}

std::vector<double> Fingerprint::dense() const {
    std::vector<double> out(dictionary ? dictionary->size() : 0, 0.0);
    for (const auto& [c, v] : values) out[c] = v;
    return out;
}

namespace {

Fingerprint keyed_counts(const FeatureDictionary& dict,
                         const std::vector<std::string>& keys) {
    Fingerprint fp;
    fp.dictionary = &dict;
    for (const std::string& key : keys) {
        int col = dict.column(key);
        if (col < 0)
            ++fp.dropped_features;  // off-dictionary features are dropped, counted
        else
            fp.add(col, 1.0);
    }
    return fp;
}

}  // namespace

Fingerprint bag_of_faces(const StructureGraph& graph, const EnergyParameters& params,
                         const FeatureDictionary& dict) {
    if (dict.kind != FeatureKind::FACE)
        throw ValidationError("bag_of_faces requires a FACE dictionary");
    std::vector<std::string> keys;
    for (const Face& f : extract_faces(graph, params)) keys.push_back(face_energy_key(f));
    return keyed_counts(dict, keys);
}

Fingerprint bag_of_neighborhoods(const StructureGraph& graph, int radius,
                                 const FeatureDictionary& dict) {
    if (dict.kind != FeatureKind::NEIGHBORHOOD)
        throw ValidationError("bag_of_neighborhoods requires a NEIGHBORHOOD dictionary");
    std::vector<std::string> keys;
    for (int c = 0; c < graph.node_count(); ++c)
        keys.push_back(rooted_neighborhood_key(graph, c, radius).canonical_form);
    return keyed_counts(dict, keys);
}

FeatureDictionary kmer_dictionary(int k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    static const char alphabet[4] = {'A', 'C', 'G', 'T'};
    FeatureDictionary dict;
    dict.kind = FeatureKind::KMER;
    long total = 1;
    for (int i = 0; i < k; ++i) total *= 4;
    dict.entries.reserve(total);
    std::string buf(k, 'A');
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = k - 1; i >= 0; --i) {
            buf[i] = alphabet[c % 4];
            c /= 4;
        }
        dict.entries.push_back(buf);
    }
    dict.rebuild_index();
    return dict;
}

Fingerprint kmer_counts(const Sequence& seq, int k, const FeatureDictionary& dict) {
    if (dict.kind != FeatureKind::KMER)
        throw ValidationError("kmer_counts requires a KMER dictionary");
    if (k < 1) throw ValidationError("k must be >= 1");
    if (seq.length() < k)
        throw ValidationError("sequence '" + seq.id + "' shorter than k = " + std::to_string(k));
    std::vector<std::string> keys;
    for (int i = 0; i + k <= seq.length(); ++i) keys.push_back(seq.bases.substr(i, k));
    return keyed_counts(dict, keys);
}

namespace {

// Probability-weighted (exhaustive) or uniform 1/n (sampled) mean of
// per-structure fingerprints.
Fingerprint expected_fingerprint(
    const Sequence& seq, const EnsembleDistribution& ensemble, const FeatureDictionary& dict,
    const std::function<Fingerprint(const StructureGraph&)>& per_structure) {
    if (ensemble.entries.empty()) throw ValidationError("empty ensemble");
    Fingerprint out;
    out.dictionary = &dict;
    double uniform_w = ensemble.sample_count > 0 ? 1.0 / ensemble.sample_count : 0.0;
    for (const EnsembleEntry& e : ensemble.entries) {
        if (static_cast<int>(e.structure.pair_table.size()) != seq.length())
            throw ValidationError("ensemble does not belong to sequence '" + seq.id + "'");
        double w = ensemble.mode == EnsembleMode::Exhaustive ? e.probability : uniform_w;
        Fingerprint fp = per_structure(build_graph(seq, e.structure));
        for (const auto& [col, v] : fp.values) out.add(col, w * v);
        out.dropped_features += fp.dropped_features;
    }
    return out;
}

}  // namespace

Fingerprint expected_bag_of_faces(const Sequence& seq, const EnsembleDistribution& ensemble,
                                  const EnergyParameters& params,
                                  const FeatureDictionary& dict) {
    return expected_fingerprint(seq, ensemble, dict, [&](const StructureGraph& g) {
        return bag_of_faces(g, params, dict);
    });
}

Fingerprint expected_bag_of_neighborhoods(const Sequence& seq,
                                          const EnsembleDistribution& ensemble, int radius,
                                          const FeatureDictionary& dict) {
    return expected_fingerprint(seq, ensemble, dict, [&](const StructureGraph& g) {
        return bag_of_neighborhoods(g, radius, dict);
    });
}

FeatureDictionary build_dictionary(
    const std::vector<std::pair<Sequence, const EnsembleDistribution*>>& corpus,
    FeatureKind kind, const EnergyParameters& params, int radius_or_k) {
    if (corpus.empty()) throw ValidationError("empty corpus");
    if (kind == FeatureKind::KMER) return kmer_dictionary(radius_or_k);

    std::set<std::string> keys;
    for (const auto& [seq, ensemble] : corpus) {
        if (!ensemble || ensemble->entries.empty())
            throw ValidationError("corpus entry '" + seq.id + "' has no ensemble");
        for (const EnsembleEntry& e : ensemble->entries) {
            StructureGraph g = build_graph(seq, e.structure);
            if (kind == FeatureKind::FACE) {
                for (const Face& f : extract_faces(g, params)) keys.insert(face_energy_key(f));
            } else {
                for (int c = 0; c < g.node_count(); ++c)
                    keys.insert(rooted_neighborhood_key(g, c, radius_or_k).canonical_form);
            }
        }
    }
    FeatureDictionary dict;
    dict.kind = kind;
    dict.entries.assign(keys.begin(), keys.end());  // set iterates sorted
    dict.rebuild_index();
    return dict;
}

FeatureMatrix assemble_matrix(const std::vector<std::string>& row_ids,
                              const std::vector<MatrixSegmentSpec>& segments) {
    if (row_ids.empty()) throw ValidationError("empty corpus");
    if (segments.empty()) throw ValidationError("no segments");

    FeatureMatrix m;
    m.row_ids = row_ids;
    for (const MatrixSegmentSpec& seg : segments) {
        if (!seg.dict) throw ValidationError("segment '" + seg.name + "' has no dictionary");
        if (seg.rows.size() != row_ids.size())
            throw ValidationError("segment '" + seg.name + "' row count " +
                                  std::to_string(seg.rows.size()) + " != corpus size " +
                                  std::to_string(row_ids.size()));
        FeatureMatrix::Segment s;
        s.name = seg.name;
        s.begin = m.cols();
        for (const std::string& key : seg.dict->entries)
            m.column_keys.push_back(seg.name + ":" + key);
        s.end = m.cols();
        m.segments.push_back(s);
    }
    m.data.assign(static_cast<std::size_t>(m.rows()) * m.cols(), 0.0);
    for (std::size_t si = 0; si < segments.size(); ++si) {
        int offset = m.segments[si].begin;
        for (int r = 0; r < m.rows(); ++r)
            for (const auto& [col, v] : segments[si].rows[r].values) {
                if (v < 0) throw ValidationError("negative fingerprint value");
                m.at(r, offset + col) = v;
            }
    }
    return m;
}

std::vector<int> epsilon_neighborhood(const std::vector<std::vector<double>>& dataset,
                                      int query_row, double epsilon) {
    if (epsilon < 0) throw ValidationError("epsilon must be >= 0");
    if (query_row < 0 || query_row >= static_cast<int>(dataset.size()))
        throw ValidationError("query row out of range");
    const std::vector<double>& q = dataset[query_row];
    std::vector<int> hits;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (dataset[r].size() != q.size())
            throw ValidationError("dataset row dimension mismatch");
        double d2 = 0.0;
        for (std::size_t c = 0; c < q.size(); ++c) {
            double diff = dataset[r][c] - q[c];
            d2 += diff * diff;
        }
        if (std::sqrt(d2) <= epsilon) hits.push_back(static_cast<int>(r));
    }
    return hits;
}

std::vector<int> epsilon_neighborhood(const FeatureMatrix& dataset, int query_row,
                                      double epsilon) {
    std::vector<std::vector<double>> rows(dataset.rows());
    for (int r = 0; r < dataset.rows(); ++r) {
        rows[r].resize(dataset.cols());
        for (int c = 0; c < dataset.cols(); ++c) rows[r][c] = dataset.at(r, c);
    }
    return epsilon_neighborhood(rows, query_row, epsilon);
}

std::vector<int> epsilon_neighborhood(const std::vector<MotzkinVector>& dataset, int query_row,
                                      double epsilon) {
    std::vector<std::vector<double>> rows(dataset.size());
    for (std::size_t r = 0; r < dataset.size(); ++r)
        rows[r].assign(dataset[r].y_values.begin(), dataset[r].y_values.end());
    return epsilon_neighborhood(rows, query_row, epsilon);
}

}  // namespace boltzfold
