#include "boltzfold/energy_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "boltzfold/errors.hpp"
#include "boltzfold/structure_graph.hpp"

namespace boltzfold {

namespace {

bool is_nucleotide(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

std::pair<char, char> normalize_pair(char a, char b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

double parse_energy(const std::string& field, long line) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad numeric value '" + field + "'", line);
    }
    if (pos != field.size()) throw ParseError("bad numeric value '" + field + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite energy '" + field + "'", line);
    return v;
}

std::string check_pair_token(const std::string& tok, long line) {
    if (tok.size() != 2 || !is_nucleotide(tok[0]) || !is_nucleotide(tok[1]))
        throw ParseError("bad nucleotide pair '" + tok + "'", line);
    return tok;
}

}  // namespace

void EnergyParameters::validate() const {
    if (min_hairpin_unpaired < 1) throw ValidationError("min_hairpin_unpaired must be >= 1");
    if (allowed_pairs.empty()) throw ValidationError("allowed_pairs is empty");
    for (double v : {hairpin_base, hairpin_per_nt, bulge_base, bulge_per_nt, internal_base,
                     internal_per_nt, multibranch_offset_a, multibranch_per_branch_b,
                     multibranch_per_unpaired_c})
        if (!std::isfinite(v)) throw ValidationError("non-finite loop energy parameter");
    for (const auto& [key, v] : stack_table) {
        if (!std::isfinite(v)) throw ValidationError("non-finite stack energy for " + key);
        if (key.size() != 5 || key[2] != '/')
            throw ValidationError("malformed stack key " + key);
        if (!can_pair(key[0], key[1]) || !can_pair(key[3], key[4]))
            throw ValidationError("stack key " + key + " uses a disallowed pair");
    }
}

void Thermo::validate() const {
    if (!(temperature_kelvin > 0)) throw ValidationError("temperature must be positive");
    if (!(boltzmann_constant > 0)) throw ValidationError("Boltzmann constant must be positive");
}

EnergyParameters toy_parameters() {
    EnergyParameters p;
    p.allowed_pairs = {{'A', 'T'}, {'C', 'G'}, {'G', 'T'}};
    p.hairpin_base = 3.0;
    p.hairpin_per_nt = 0.5;
    p.bulge_base = 4.0;
    p.bulge_per_nt = 0.3;
    p.internal_base = 4.5;
    p.internal_per_nt = 0.3;
    p.multibranch_offset_a = 3.4;
    p.multibranch_per_branch_b = 0.4;
    p.multibranch_per_unpaired_c = 0.0;
    p.min_hairpin_unpaired = 3;

    // All stacks -2.0 except any involving a G·T pair (-1.0), over every
    // orientation of the allowed pairs.
    std::vector<std::pair<char, char>> oriented;
    for (auto [a, b] : p.allowed_pairs) {
        oriented.emplace_back(a, b);
        oriented.emplace_back(b, a);
    }
    auto is_gt = [](std::pair<char, char> q) {
        return normalize_pair(q.first, q.second) == std::make_pair('G', 'T');
    };
    for (auto outer : oriented)
        for (auto inner : oriented) {
            std::string key{outer.first, outer.second, '/', inner.first, inner.second};
            p.stack_table[key] = (is_gt(outer) || is_gt(inner)) ? -1.0 : -2.0;
        }
    return p;
}

EnergyParameters parse_parameters(const std::string& text) {
    EnergyParameters p = toy_parameters();
    bool pairs_reset = false;
    std::set<std::string> file_stack_keys;

    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        const std::string& kind = fields[0];
        auto want = [&](std::size_t n) {
            if (fields.size() != n)
                throw ParseError("record " + kind + " expects " + std::to_string(n - 1) +
                                     " field(s)",
                                 lineno);
        };

        if (kind == "STACK") {
            want(4);
            std::string outer = check_pair_token(fields[1], lineno);
            std::string inner = check_pair_token(fields[2], lineno);
            p.stack_table[outer + "/" + inner] = parse_energy(fields[3], lineno);
            file_stack_keys.insert(outer + "/" + inner);
        } else if (kind == "HAIRPIN_BASE") {
            want(2);
            p.hairpin_base = parse_energy(fields[1], lineno);
        } else if (kind == "HAIRPIN_PER_NT") {
            want(2);
            p.hairpin_per_nt = parse_energy(fields[1], lineno);
        } else if (kind == "BULGE_BASE") {
            want(2);
            p.bulge_base = parse_energy(fields[1], lineno);
        } else if (kind == "BULGE_PER_NT") {
            want(2);
            p.bulge_per_nt = parse_energy(fields[1], lineno);
        } else if (kind == "INTERNAL_BASE") {
            want(2);
            p.internal_base = parse_energy(fields[1], lineno);
        } else if (kind == "INTERNAL_PER_NT") {
            want(2);
            p.internal_per_nt = parse_energy(fields[1], lineno);
        } else if (kind == "MULTI_A") {
            want(2);
            p.multibranch_offset_a = parse_energy(fields[1], lineno);
        } else if (kind == "MULTI_B") {
            want(2);
            p.multibranch_per_branch_b = parse_energy(fields[1], lineno);
        } else if (kind == "MULTI_C") {
            want(2);
            p.multibranch_per_unpaired_c = parse_energy(fields[1], lineno);
        } else if (kind == "MIN_HAIRPIN") {
            want(2);
            double v = parse_energy(fields[1], lineno);
            if (v < 1 || v != std::floor(v)) throw ParseError("MIN_HAIRPIN must be a positive integer", lineno);
            p.min_hairpin_unpaired = static_cast<int>(v);
        } else if (kind == "PAIR") {
            want(2);
            std::string tok = check_pair_token(fields[1], lineno);
            if (!pairs_reset) {
                p.allowed_pairs.clear();
                pairs_reset = true;
            }
            p.allowed_pairs.insert(normalize_pair(tok[0], tok[1]));
        } else {
            throw ParseError("unknown record kind '" + kind + "'", lineno);
        }
    }

    if (pairs_reset) {
        // Default stack entries may reference pairs no longer allowed;
        // file-provided entries are kept so validate() can flag them.
        for (auto it = p.stack_table.begin(); it != p.stack_table.end();) {
            const std::string& k = it->first;
            if (!file_stack_keys.count(k) && (!p.can_pair(k[0], k[1]) || !p.can_pair(k[3], k[4])))
                it = p.stack_table.erase(it);
            else
                ++it;
        }
    }
    p.validate();
    return p;
}

EnergyParameters load_parameters(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read parameter file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_parameters(buf.str());
}

double face_energy(const Face& face, const Sequence& seq, const EnergyParameters& params) {
    auto [i, j] = face.defining_pair;
    switch (face.face_type) {
        case FaceType::HAIRPIN: {
            int loop_len = face.unpaired_lengths.at(0);
            return params.hairpin_base +
                   params.hairpin_per_nt * (loop_len - params.min_hairpin_unpaired);
        }
        case FaceType::STACK: {
            auto [k, l] = face.nested_pairs.at(0);
            std::string key{seq.bases[i], seq.bases[j], '/', seq.bases[k], seq.bases[l]};
            auto it = params.stack_table.find(key);
            if (it == params.stack_table.end())
                throw ValidationError("stack entry " + key + " missing from parameter set");
            return it->second;
        }
        case FaceType::BULGE:
            return params.bulge_base + params.bulge_per_nt * face.unpaired_lengths.at(0);
        case FaceType::INTERNAL:
            return params.internal_base +
                   params.internal_per_nt *
                       (face.unpaired_lengths.at(0) + face.unpaired_lengths.at(1));
        case FaceType::MULTIBRANCH:
            return params.multibranch_offset_a +
                   params.multibranch_per_branch_b * face.branches() +
                   params.multibranch_per_unpaired_c * face.unpaired_lengths.at(0);
    }
    throw ValidationError("unreachable face type");
}

}  // namespace boltzfold
