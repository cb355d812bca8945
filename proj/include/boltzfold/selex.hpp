#ifndef BOLTZFOLD_SELEX_HPP
#define BOLTZFOLD_SELEX_HPP

#include <map>
#include <string>
#include <vector>

#include "boltzfold/sequence.hpp"

namespace boltzfold {

/// One (library, round, sequence, count) observation.
struct SelexRecord {
    std::string library;
    int round = 0;
    std::string sequence;
    long long count = 0;
};

enum class AnomalyLabel { NONE, HC_LP, LC_HP };

const char* anomaly_label_name(AnomalyLabel l);

struct AptamerProfile {
    std::string sequence;
    // Per library: CPM from the last round the aptamer appears in.
    std::map<std::string, double> cpm_by_library;
    std::map<std::string, double> pressure_by_library;
    double final_cpm_score = 0.0;  // decile-midpoint score in [0, 1]
    double total_pressure = 0.0;
    AnomalyLabel label = AnomalyLabel::NONE;
};

/// Parses the reads TSV (library<TAB>round<TAB>sequence<TAB>count,
/// '#' comments). Duplicate keys are summed.
std::vector<SelexRecord> parse_reads(const std::string& path);
std::vector<SelexRecord> parse_reads_text(const std::string& text);

/// Removes, per library, sequences absent from that library's earliest
/// round; a sequence survives overall if it survives in any library.
/// Throws ValidationError on a single-round library.
std::vector<SelexRecord> filter_mutations(const std::vector<SelexRecord>& records);

/// Builds per-aptamer profiles from filtered records: last-round CPM per
/// library, max-CPM decile-midpoint score, and per-library selective
/// pressure summed over libraries.
std::vector<AptamerProfile> build_profiles(const std::vector<SelexRecord>& records);

/// Rank-based decile placement of CPM values onto [0, 1] midpoints.
/// Ties broken by sequence lexicographic order; highest CPM lands in the
/// top decile.
void normalize_counts(std::vector<AptamerProfile>& profiles);

/// Selective pressure (C_y - C_x) / C_x per library, earliest to latest
/// round, summed over the libraries where the aptamer appears.
void selective_pressure(std::vector<AptamerProfile>& profiles,
                        const std::vector<SelexRecord>& records);

/// Threshold labeling: HC-LP at (score >= high count pct, pressure <=
/// low pressure pct), LC-HP mirrored at the opposite tails. Percentiles
/// use the nearest-rank convention; degenerate (zero-spread) score or
/// pressure distributions produce no labels.
void label_anomalies(std::vector<AptamerProfile>& profiles, double count_percentile = 90.0,
                     double pressure_percentile = 10.0);

/// Nearest-rank percentile of a sample (p in [0, 100]).
double nearest_rank_percentile(std::vector<double> values, double p);

}  // namespace boltzfold

#endif
