#include "boltzfold/selex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "boltzfold/errors.hpp"

namespace boltzfold {

const char* anomaly_label_name(AnomalyLabel l) {
    switch (l) {
        case AnomalyLabel::NONE: return "NONE";
        case AnomalyLabel::HC_LP: return "HC_LP";
        case AnomalyLabel::LC_HP: return "LC_HP";
    }
    return "?";
}

std::vector<SelexRecord> parse_reads_text(const std::string& text) {
    std::map<std::tuple<std::string, int, std::string>, long long> agg;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (f.size() != 4) throw ParseError("expected 4 tab-separated fields", lineno);

        int round;
        long long count;
        try {
            std::size_t pos;
            round = std::stoi(f[1], &pos);
            if (pos != f[1].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("bad round '" + f[1] + "'", lineno);
        }
        try {
            std::size_t pos;
            count = std::stoll(f[3], &pos);
            if (pos != f[3].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("bad count '" + f[3] + "'", lineno);
        }
        if (count < 0) throw ParseError("negative count " + std::to_string(count), lineno);
        for (char c : f[2])
            if (c != 'A' && c != 'C' && c != 'G' && c != 'T')
                throw ParseError("bad base '" + std::string(1, c) + "' in sequence", lineno);
        if (f[2].empty()) throw ParseError("empty sequence", lineno);

        agg[{f[0], round, f[2]}] += count;
    }
    std::vector<SelexRecord> out;
    out.reserve(agg.size());
    for (const auto& [key, count] : agg)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    return out;
}

std::vector<SelexRecord> parse_reads(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read SELEX file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_reads_text(buf.str());
}

namespace {

std::map<std::string, std::set<int>> rounds_by_library(const std::vector<SelexRecord>& records) {
    std::map<std::string, std::set<int>> rounds;
    for (const SelexRecord& r : records) rounds[r.library].insert(r.round);
    return rounds;
}

}  // namespace

std::vector<SelexRecord> filter_mutations(const std::vector<SelexRecord>& records) {
    auto rounds = rounds_by_library(records);
    for (const auto& [lib, rs] : rounds)
        if (rs.size() < 2)
            throw ValidationError("library '" + lib + "' has fewer than 2 rounds");

    // Sequences present (count > 0) in each library's earliest round.
    std::map<std::string, std::set<std::string>> seeded;
    for (const SelexRecord& r : records)
        if (r.round == *rounds[r.library].begin() && r.count > 0)
            seeded[r.library].insert(r.sequence);

    std::vector<SelexRecord> out;
    for (const SelexRecord& r : records)
        if (seeded[r.library].count(r.sequence)) out.push_back(r);
    return out;
}

void normalize_counts(std::vector<AptamerProfile>& profiles) {
    if (profiles.empty()) throw ValidationError("no profiles to normalize");
    const int n = static_cast<int>(profiles.size());

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double ca = 0, cb = 0;
        for (const auto& [lib, c] : profiles[a].cpm_by_library) ca = std::max(ca, c);
        for (const auto& [lib, c] : profiles[b].cpm_by_library) cb = std::max(cb, c);
        if (ca != cb) return ca < cb;
        return profiles[a].sequence < profiles[b].sequence;
    });

    // Rank-based decile placement: the highest CPM lands in the top bin,
    // items sit at evenly spaced midpoints within each bin.
    std::vector<int> bin_of(n);
    std::vector<int> bin_size(10, 0);
    for (int t = 0; t < n; ++t) {
        int bin = 9 - (n - 1 - t) * 10 / n;
        bin_of[t] = bin;
        ++bin_size[bin];
    }
    std::vector<int> seen(10, 0);
    for (int t = 0; t < n; ++t) {
        int j = bin_of[t];
        int within = seen[j]++;
        profiles[order[t]].final_cpm_score =
            j / 10.0 + (within + 0.5) / (10.0 * bin_size[j]);
    }
}

std::vector<AptamerProfile> build_profiles(const std::vector<SelexRecord>& records) {
    if (records.empty()) throw ValidationError("no records");

    // Per (library, sequence): positive counts per round.
    std::map<std::string, std::map<std::string, std::map<int, long long>>> by_lib;
    for (const SelexRecord& r : records)
        if (r.count > 0) by_lib[r.library][r.sequence][r.round] = r.count;

    std::map<std::string, AptamerProfile> profiles;
    for (const auto& [lib, seqs] : by_lib) {
        // CPM pools: group by the last round each aptamer appears in.
        std::map<int, long long> pool_totals;
        for (const auto& [seq, per_round] : seqs)
            pool_totals[per_round.rbegin()->first] += per_round.rbegin()->second;
        for (const auto& [seq, per_round] : seqs) {
            AptamerProfile& p = profiles[seq];
            p.sequence = seq;
            long long total = pool_totals[per_round.rbegin()->first];
            p.cpm_by_library[lib] = total > 0 ? 1e6 * per_round.rbegin()->second / total : 0.0;
        }
    }

    std::vector<AptamerProfile> out;
    out.reserve(profiles.size());
    for (auto& [seq, p] : profiles) out.push_back(std::move(p));
    selective_pressure(out, records);
    normalize_counts(out);
    return out;
}

void selective_pressure(std::vector<AptamerProfile>& profiles,
                        const std::vector<SelexRecord>& records) {
    auto lib_rounds = rounds_by_library(records);
    std::map<std::string, std::map<std::string, std::map<int, long long>>> by_seq;
    for (const SelexRecord& r : records)
        if (r.count > 0) by_seq[r.sequence][r.library][r.round] = r.count;

    for (AptamerProfile& p : profiles) {
        p.pressure_by_library.clear();
        p.total_pressure = 0.0;
        auto it = by_seq.find(p.sequence);
        if (it == by_seq.end()) continue;
        for (const auto& [lib, per_round] : it->second) {
            // Library's earliest round to its latest round; absence
            // from the latest round counts as 0.
            int x = *lib_rounds[lib].begin();
            int y = *lib_rounds[lib].rbegin();
            auto cx_it = per_round.find(x);
            if (cx_it == per_round.end() || cx_it->second <= 0)
                throw ValidationError("aptamer '" + p.sequence +
                                      "' has no count in the earliest round of " + lib +
                                      " (records not filtered?)");
            long long cx = cx_it->second;
            auto cy_it = per_round.find(y);
            long long cy = cy_it == per_round.end() ? 0 : cy_it->second;
            double rho = static_cast<double>(cy - cx) / cx;
            p.pressure_by_library[lib] = rho;
            p.total_pressure += rho;
        }
    }
}

double nearest_rank_percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile of empty sample");
    if (p < 0 || p > 100) throw ValidationError("percentile out of [0, 100]");
    std::sort(values.begin(), values.end());
    if (p == 0) return values.front();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * values.size()));
    return values[rank - 1];
}

void label_anomalies(std::vector<AptamerProfile>& profiles, double count_percentile,
                     double pressure_percentile) {
    if (profiles.size() < 10)
        throw ValidationError("need at least 10 profiles for percentile labeling");

    std::vector<double> scores, pressures;
    for (const AptamerProfile& p : profiles) {
        scores.push_back(p.final_cpm_score);
        pressures.push_back(p.total_pressure);
    }
    double c_hi = nearest_rank_percentile(scores, count_percentile);
    double c_lo = nearest_rank_percentile(scores, 100.0 - count_percentile);
    double rho_lo = nearest_rank_percentile(pressures, pressure_percentile);
    double rho_hi = nearest_rank_percentile(pressures, 100.0 - pressure_percentile);

    // A zero-spread score or pressure distribution makes both tails
    // coincide; labeling would mark everything, so mark nothing.
    bool degenerate = !(c_hi > c_lo) || !(rho_hi > rho_lo);
    for (AptamerProfile& p : profiles) {
        p.label = AnomalyLabel::NONE;
        if (degenerate) continue;
        if (p.final_cpm_score >= c_hi && p.total_pressure <= rho_lo)
            p.label = AnomalyLabel::HC_LP;
        else if (p.final_cpm_score <= c_lo && p.total_pressure >= rho_hi)
            p.label = AnomalyLabel::LC_HP;
    }
}

}  // namespace boltzfold
