#ifndef BOLTZFOLD_ANALYSIS_HPP
#define BOLTZFOLD_ANALYSIS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace boltzfold {

struct AptamerProfile;

struct TopicModel {
    Eigen::MatrixXd M;  // documents x topics, nonnegative
    Eigen::MatrixXd H;  // topics x features, nonnegative
    int topics = 0;
    double final_objective = 0.0;  // ||X - MH||_F
};

struct Clustering {
    std::vector<int> assignments;  // cluster ids in [0, k)
    int k = 0;
    double silhouette = 0.0;
};

struct AttributionModel {
    Eigen::VectorXd w;
    double lambda = 1.0;
    std::vector<int> negative_set;  // {i : w_i < 0}
    std::vector<int> positive_set;  // complement
    std::vector<int> top_neg;       // up to 5 most negative coefficients
    std::vector<int> top_pos;       // up to 5 most positive (nonnegative) coefficients
};

struct ClusterAnomalyReport {
    std::map<int, double> delta;            // cluster -> Delta_C
    std::vector<int> anomalous_clusters;    // top_m by Delta, descending
    // cluster -> (highest-score row, highest-pressure row)
    std::map<int, std::pair<int, int>> recommended;
};

/// Frobenius NMF by multiplicative updates; objective nonincreasing,
/// deterministic by seed. Throws on negative input entries.
TopicModel nmf(const Eigen::MatrixXd& X, int topics, int max_iters = 500, double tol = 1e-9,
               std::uint64_t seed = 0);

/// Gaussian-kernel similarity on either-direction kNN edges, symmetrized
/// by max, zero diagonal. Bandwidth is the median kth-neighbor distance.
Eigen::MatrixXd knn_similarity(const Eigen::MatrixXd& X, int k_neighbors);

/// Unnormalized-Laplacian spectral clustering: embed by the eigenvectors
/// of the embed_dim smallest eigenvalues of L = D - A, then seeded
/// k-means++ (10 restarts, best inertia). embed_dim <= 0 means k_clusters.
Clustering spectral_clustering(const Eigen::MatrixXd& A, int k_clusters, std::uint64_t seed,
                               int embed_dim = 0);

/// Mean silhouette of a labeled point set under Euclidean distance.
double silhouette_score(const Eigen::MatrixXd& points, const std::vector<int>& assignments,
                        int k);

/// Sweeps k over [k_min, k_max], returns the k with the highest
/// silhouette (ties to the smaller k).
int silhouette_sweep(const Eigen::MatrixXd& M, int k_min = 5, int k_max = 50,
                     std::uint64_t seed = 0, int k_neighbors = 10);

/// Ridge regression via the normal equations (X^T X + lambda I) w = X^T y.
AttributionModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

/// Delta_C anomaly scores per cluster plus the top_m anomalous set.
ClusterAnomalyReport cluster_delta(const Eigen::MatrixXd& X, const AttributionModel& model,
                                   const Clustering& clustering, int top_m = 10);

struct RestrictedAnalysis {
    std::vector<int> row_indices;     // rows of X kept
    std::vector<int> column_indices;  // columns of X kept
    Eigen::MatrixXd W;                // the restricted matrix
    TopicModel topic_model;
    Clustering clustering;
};

/// W- (all rows, negative columns) and W+ (rows outside anomalous
/// clusters, nonnegative columns), each re-run through NMF + spectral
/// clustering.
std::pair<RestrictedAnalysis, RestrictedAnalysis> restrict_and_rerun(
    const Eigen::MatrixXd& X, const AttributionModel& model, const Clustering& clustering,
    const std::vector<int>& anomalous, int topics = 25, int k_clusters = 25,
    std::uint64_t seed = 0, int k_neighbors = 10);

/// Per-cluster (highest final_cpm_score row, highest total_pressure row).
/// row_profiles maps clustering rows onto profiles.
std::map<int, std::pair<int, int>> recommend(const Clustering& clustering,
                                             const std::vector<const AptamerProfile*>& row_profiles);

struct TsneResult {
    Eigen::MatrixXd Y;  // N x 2
    double final_kl = 0.0;
};

/// Exact t-SNE: perplexity-calibrated Gaussian affinities, Student-t
/// outputs, momentum gradient descent with early exaggeration.
TsneResult tsne(const Eigen::MatrixXd& X, double perplexity = 30.0, int iters = 1000,
                std::uint64_t seed = 0);

}  // namespace boltzfold

#endif
