#ifndef BOLTZFOLD_IO_HPP
#define BOLTZFOLD_IO_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "boltzfold/analysis.hpp"
#include "boltzfold/fingerprint.hpp"
#include "boltzfold/selex.hpp"

namespace boltzfold {

/// Shortest round-trip decimal form of v; stable across reruns.
std::string format_double(double v);

/// Header "id<TAB>key..." then one row per id. Segment names are already
/// baked into the column keys ("FACE:", "NBH:", "KMER:").
void write_matrix_tsv(const std::string& path, const FeatureMatrix& m);
FeatureMatrix read_matrix_tsv(const std::string& path);

/// {"id", "segment", "values": {key: value}}
void write_fingerprint_json(const std::string& path, const std::string& id,
                            const std::string& segment, const Fingerprint& fp);

/// id, sequence, final_cpm_score, total_pressure, label.
void write_profiles_tsv(const std::string& path, const std::vector<std::string>& ids,
                        const std::vector<AptamerProfile>& profiles);

void write_clusters_tsv(const std::string& path, const std::vector<std::string>& ids,
                        const Clustering& clustering);

void write_topics_tsv(const std::string& dir, const TopicModel& model,
                      const std::vector<std::string>& row_ids);

void write_coords_tsv(const std::string& path, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& Y);

Eigen::MatrixXd read_coords_tsv(const std::string& path, std::vector<std::string>& ids);

/// {cluster: {delta, members, anomalous, recommended: [score_id, pressure_id]}}
void write_anomalies_json(const std::string& path, const ClusterAnomalyReport& report,
                          const Clustering& clustering,
                          const std::vector<std::string>& ids);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Cluster-colored SVG scatter; marker overrides keyed by row index.
struct ScatterMark {
    enum Kind { RED_CROSS, GREEN_CROSS, BLUE_CROSS } kind;
};

std::string render_scatter_svg(const Eigen::MatrixXd& Y, const std::vector<int>& clusters,
                               const std::map<int, ScatterMark>& marks,
                               const std::vector<int>& outlined_clusters);

}  // namespace boltzfold

#endif
