#include "boltzfold/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "boltzfold/errors.hpp"
#include "boltzfold/rng.hpp"
#include "boltzfold/selex.hpp"

namespace boltzfold {

namespace {

constexpr double kTiny = 1e-12;

void check_nonnegative(const Eigen::MatrixXd& X, const char* who) {
    if ((X.array() < 0).any())
        throw ValidationError(std::string(who) + " requires a nonnegative matrix");
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& X) {
    Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd D = sq.replicate(1, X.rows()) + sq.transpose().replicate(X.rows(), 1) -
                        2.0 * X * X.transpose();
    return D.cwiseMax(0.0);
}

}  // namespace

TopicModel nmf(const Eigen::MatrixXd& X, int topics, int max_iters, double tol,
               std::uint64_t seed) {
    check_nonnegative(X, "nmf");
    const int rows = static_cast<int>(X.rows());
    const int cols = static_cast<int>(X.cols());
    if (topics < 1 || topics > std::min(rows, cols))
        throw ValidationError("nmf topics must be in [1, min(rows, cols)]");

    // Nonnegative uniform init scaled to the data magnitude.
    CounterRng rng(derive_seed(seed, "nmf-init"));
    double scale = std::sqrt(std::max(X.mean(), kTiny) / topics);
    Eigen::MatrixXd M(rows, topics), H(topics, cols);
    for (int i = 0; i < rows; ++i)
        for (int t = 0; t < topics; ++t) M(i, t) = scale * rng.next_double();
    for (int t = 0; t < topics; ++t)
        for (int j = 0; j < cols; ++j) H(t, j) = scale * rng.next_double();

    double prev = (X - M * H).norm();
    for (int iter = 0; iter < max_iters; ++iter) {
        // Lee-Seung multiplicative updates for the Frobenius objective.
        Eigen::MatrixXd num_h = M.transpose() * X;
        Eigen::MatrixXd den_h = M.transpose() * M * H;
        H = H.cwiseProduct(num_h.cwiseQuotient(den_h.array().max(kTiny).matrix()));

        Eigen::MatrixXd num_m = X * H.transpose();
        Eigen::MatrixXd den_m = M * H * H.transpose();
        M = M.cwiseProduct(num_m.cwiseQuotient(den_m.array().max(kTiny).matrix()));

        double obj = (X - M * H).norm();
        if (prev > 0 && (prev - obj) / std::max(prev, kTiny) < tol) {
            prev = obj;
            break;
        }
        prev = obj;
    }

    TopicModel model;
    model.M = std::move(M);
    model.H = std::move(H);
    model.topics = topics;
    model.final_objective = prev;
    return model;
}

Eigen::MatrixXd knn_similarity(const Eigen::MatrixXd& X, int k_neighbors) {
    const int n = static_cast<int>(X.rows());
    if (k_neighbors < 1) throw ValidationError("k_neighbors must be >= 1");
    if (k_neighbors >= n) throw ValidationError("k_neighbors must be < number of rows");

    Eigen::MatrixXd D2 = pairwise_sq_dists(X);

    // kth-neighbor distance per point; the median is the kernel bandwidth.
    std::vector<double> kth(n);
    std::vector<std::vector<int>> neighbors(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (D2(i, a) != D2(i, b)) return D2(i, a) < D2(i, b);
            return a < b;
        });
        int taken = 0;
        for (int j : order) {
            if (j == i) continue;
            neighbors[i].push_back(j);
            if (++taken == k_neighbors) break;
        }
        kth[i] = std::sqrt(D2(i, neighbors[i].back()));
    }
    std::vector<double> kth_sorted = kth;
    std::sort(kth_sorted.begin(), kth_sorted.end());
    double sigma = kth_sorted[n / 2];
    if (sigma <= 0) sigma = 1.0;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j : neighbors[i]) {
            double w = std::exp(-D2(i, j) / (2.0 * sigma * sigma));
            // Either-direction edge, symmetrized by max.
            A(i, j) = std::max(A(i, j), w);
            A(j, i) = std::max(A(j, i), w);
        }
    A.diagonal().setZero();
    return A;
}

namespace {

struct KMeansResult {
    std::vector<int> assignments;
    double inertia = std::numeric_limits<double>::infinity();
};

KMeansResult kmeans_once(const Eigen::MatrixXd& P, int k, CounterRng& rng) {
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd centroids(k, P.cols());

    // k-means++ seeding.
    int first = static_cast<int>(rng.next_double() * n);
    if (first >= n) first = n - 1;
    centroids.row(0) = P.row(first);
    Eigen::VectorXd d2 = (P.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        int pick = n - 1;
        if (total > 0) {
            double u = rng.next_double() * total;
            double cum = 0;
            for (int i = 0; i < n; ++i) {
                cum += d2(i);
                if (u < cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.next_double() * n) % n;
        }
        centroids.row(c) = P.row(pick);
        d2 = d2.cwiseMin((P.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (P.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (P.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        // Recompute centroids; an emptied cluster takes the point
        // farthest from its current centroid.
        std::vector<int> counts(k, 0);
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, P.cols());
        for (int i = 0; i < n; ++i) {
            sums.row(assign[i]) += P.row(i);
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centroids.row(c) = sums.row(c) / counts[c];
            } else {
                int far = 0;
                double far_d = -1;
                for (int i = 0; i < n; ++i) {
                    if (counts[assign[i]] <= 1) continue;
                    double d = (P.row(i) - centroids.row(assign[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                --counts[assign[far]];
                assign[far] = c;
                ++counts[c];
                centroids.row(c) = P.row(far);
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
    }

    KMeansResult r;
    r.assignments = std::move(assign);
    r.inertia = 0;
    for (int i = 0; i < n; ++i) r.inertia += (P.row(i) - centroids.row(r.assignments[i])).squaredNorm();
    return r;
}

}  // namespace

double silhouette_score(const Eigen::MatrixXd& points, const std::vector<int>& assignments,
                        int k) {
    const int n = static_cast<int>(points.rows());
    if (static_cast<int>(assignments.size()) != n)
        throw ValidationError("assignment length mismatch");
    if (k < 2) throw ValidationError("silhouette requires k >= 2");

    Eigen::MatrixXd D = pairwise_sq_dists(points).cwiseSqrt();
    if (D.maxCoeff() <= 0)
        throw ValidationError("degenerate distances: all points identical");

    std::vector<int> sizes(k, 0);
    for (int a : assignments) sizes[a]++;

    double total = 0;
    for (int i = 0; i < n; ++i) {
        if (sizes[assignments[i]] <= 1) continue;  // singleton contributes 0
        std::vector<double> mean_d(k, 0);
        for (int j = 0; j < n; ++j)
            if (j != i) mean_d[assignments[j]] += D(i, j);
        double a = mean_d[assignments[i]] / (sizes[assignments[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == assignments[i] || sizes[c] == 0) continue;
            b = std::min(b, mean_d[c] / sizes[c]);
        }
        if (std::isfinite(b)) total += (b - a) / std::max(a, b);
    }
    return total / n;
}

Clustering spectral_clustering(const Eigen::MatrixXd& A, int k_clusters, std::uint64_t seed,
                               int embed_dim) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw ValidationError("similarity matrix must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw ValidationError("similarity matrix must be symmetric");
    check_nonnegative(A, "spectral_clustering");
    if (k_clusters < 2 || k_clusters > n)
        throw ValidationError("k_clusters must be in [2, rows]");
    if (embed_dim <= 0) embed_dim = k_clusters;
    embed_dim = std::min(embed_dim, n);

    Eigen::MatrixXd L = Eigen::MatrixXd(A.rowwise().sum().asDiagonal()) - A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
    if (solver.info() != Eigen::Success)
        throw ValidationError("Laplacian eigendecomposition failed");
    // Eigenvectors of the embed_dim smallest eigenvalues.
    Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(embed_dim);

    CounterRng rng(derive_seed(seed, "kmeans"));
    KMeansResult best;
    for (int restart = 0; restart < 10; ++restart) {
        KMeansResult r = kmeans_once(embedding, k_clusters, rng);
        if (r.inertia < best.inertia) best = std::move(r);
    }

    Clustering result;
    result.assignments = std::move(best.assignments);
    result.k = k_clusters;
    result.silhouette = silhouette_score(embedding, result.assignments, k_clusters);
    return result;
}

int silhouette_sweep(const Eigen::MatrixXd& M, int k_min, int k_max, std::uint64_t seed,
                     int k_neighbors) {
    const int n = static_cast<int>(M.rows());
    if (k_max >= n) throw ValidationError("k_max must be < rows");
    if (k_min < 2 || k_min > k_max) throw ValidationError("bad sweep bounds");
    if (pairwise_sq_dists(M).maxCoeff() <= 0)
        throw ValidationError("degenerate distances: all points identical");

    Eigen::MatrixXd A = knn_similarity(M, std::min(k_neighbors, n - 1));
    int best_k = k_min;
    double best_s = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        Clustering c = spectral_clustering(A, k, derive_seed(seed, "sweep-" + std::to_string(k)));
        if (c.silhouette > best_s) {  // ties keep the smaller k
            best_s = c.silhouette;
            best_k = k;
        }
    }
    return best_k;
}

AttributionModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
    if (X.rows() != y.size()) throw ValidationError("ridge: rows(X) != length(y)");
    if (lambda < 0) throw ValidationError("ridge: lambda must be >= 0");
    const int d = static_cast<int>(X.cols());

    Eigen::MatrixXd gram = X.transpose() * X + lambda * Eigen::MatrixXd::Identity(d, d);
    AttributionModel model;
    model.lambda = lambda;
    model.w = gram.ldlt().solve(X.transpose() * y);

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (model.w(a) != model.w(b)) return model.w(a) < model.w(b);
        return a < b;
    });
    for (int i : order) {
        if (model.w(i) < 0)
            model.negative_set.push_back(i);
        else
            model.positive_set.push_back(i);
    }
    std::sort(model.negative_set.begin(), model.negative_set.end());
    std::sort(model.positive_set.begin(), model.positive_set.end());

    for (int t = 0; t < static_cast<int>(order.size()) && t < 5; ++t)
        if (model.w(order[t]) < 0) model.top_neg.push_back(order[t]);
    for (int t = d - 1; t >= 0 && static_cast<int>(model.top_pos.size()) < 5; --t)
        if (model.w(order[t]) >= 0) model.top_pos.push_back(order[t]);
    return model;
}

ClusterAnomalyReport cluster_delta(const Eigen::MatrixXd& X, const AttributionModel& model,
                                   const Clustering& clustering, int top_m) {
    if (X.rows() != static_cast<long>(clustering.assignments.size()))
        throw ValidationError("cluster_delta: matrix rows != assignment length");
    if (top_m < 0) throw ValidationError("top_m must be >= 0");

    ClusterAnomalyReport report;
    for (int c = 0; c < clustering.k; ++c) {
        std::vector<int> members;
        for (int i = 0; i < static_cast<int>(clustering.assignments.size()); ++i)
            if (clustering.assignments[i] == c) members.push_back(i);
        if (members.empty()) continue;  // skipped, diagnostic is the absent key

        auto mean_over = [&](const std::vector<int>& cols) {
            if (cols.empty()) return 0.0;
            double s = 0;
            for (int col : cols)
                for (int i : members) s += X(i, col);
            return s / (static_cast<double>(cols.size()) * members.size());
        };
        report.delta[c] = mean_over(model.top_neg) - mean_over(model.top_pos);
    }

    std::vector<std::pair<double, int>> ranked;
    for (const auto& [c, d] : report.delta) ranked.emplace_back(-d, c);
    std::sort(ranked.begin(), ranked.end());
    int take = std::min<int>(top_m, static_cast<int>(ranked.size()));
    for (int i = 0; i < take; ++i) report.anomalous_clusters.push_back(ranked[i].second);
    std::sort(report.anomalous_clusters.begin(), report.anomalous_clusters.end());
    return report;
}

std::pair<RestrictedAnalysis, RestrictedAnalysis> restrict_and_rerun(
    const Eigen::MatrixXd& X, const AttributionModel& model, const Clustering& clustering,
    const std::vector<int>& anomalous, int topics, int k_clusters, std::uint64_t seed,
    int k_neighbors) {
    if (X.rows() != static_cast<long>(clustering.assignments.size()))
        throw ValidationError("restrict_and_rerun: matrix rows != assignment length");

    auto run = [&](const std::vector<int>& rows, const std::vector<int>& cols,
                   const char* tag) {
        if (cols.empty()) throw ValidationError(std::string(tag) + ": empty column set");
        if (rows.empty()) throw ValidationError(std::string(tag) + ": empty row set");
        RestrictedAnalysis r;
        r.row_indices = rows;
        r.column_indices = cols;
        r.W.resize(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) r.W(i, j) = X(rows[i], cols[j]);
        int t = std::min<int>(topics, std::min(r.W.rows(), r.W.cols()));
        r.topic_model = nmf(r.W, t, 500, 1e-9, derive_seed(seed, std::string(tag) + "-nmf"));
        int k = std::min<int>(k_clusters, static_cast<int>(rows.size()) - 1);
        Eigen::MatrixXd A =
            knn_similarity(r.topic_model.M, std::min<int>(k_neighbors, rows.size() - 1));
        r.clustering = spectral_clustering(A, std::max(k, 2),
                                           derive_seed(seed, std::string(tag) + "-cluster"));
        return r;
    };

    std::vector<int> all_rows(X.rows());
    std::iota(all_rows.begin(), all_rows.end(), 0);
    RestrictedAnalysis neg = run(all_rows, model.negative_set, "W-");

    std::vector<char> is_anomalous_cluster(clustering.k, 0);
    for (int c : anomalous)
        if (c >= 0 && c < clustering.k) is_anomalous_cluster[c] = 1;
    std::vector<int> kept_rows;
    for (int i = 0; i < static_cast<int>(clustering.assignments.size()); ++i)
        if (!is_anomalous_cluster[clustering.assignments[i]]) kept_rows.push_back(i);
    RestrictedAnalysis pos = run(kept_rows, model.positive_set, "W+");

    return {std::move(neg), std::move(pos)};
}

std::map<int, std::pair<int, int>> recommend(
    const Clustering& clustering, const std::vector<const AptamerProfile*>& row_profiles) {
    if (clustering.assignments.size() != row_profiles.size())
        throw ValidationError("recommend: clustering/profile length mismatch");
    std::map<int, std::pair<int, int>> out;
    for (int c = 0; c < clustering.k; ++c) {
        int best_score = -1, best_pressure = -1;
        for (int i = 0; i < static_cast<int>(row_profiles.size()); ++i) {
            if (clustering.assignments[i] != c) continue;
            if (best_score < 0 ||
                row_profiles[i]->final_cpm_score > row_profiles[best_score]->final_cpm_score)
                best_score = i;
            if (best_pressure < 0 ||
                row_profiles[i]->total_pressure > row_profiles[best_pressure]->total_pressure)
                best_pressure = i;
        }
        if (best_score >= 0) out[c] = {best_score, best_pressure};
    }
    return out;
}

TsneResult tsne(const Eigen::MatrixXd& X, double perplexity, int iters, std::uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    if (perplexity <= 0) throw ValidationError("perplexity must be positive");
    if (n < 3 * perplexity)
        throw ValidationError("t-SNE requires rows >= 3 * perplexity");

    Eigen::MatrixXd D2 = pairwise_sq_dists(X);

    // Binary-search each point's Gaussian bandwidth to the target
    // perplexity, then symmetrize.
    double log_perp = std::log(perplexity);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double beta = 1.0, beta_lo = 0.0, beta_hi = std::numeric_limits<double>::infinity();
        Eigen::VectorXd p(n);
        for (int iter = 0; iter < 64; ++iter) {
            double sum = 0;
            for (int j = 0; j < n; ++j) {
                p(j) = j == i ? 0.0 : std::exp(-beta * D2(i, j));
                sum += p(j);
            }
            double entropy = 0;
            if (sum > 0) {
                for (int j = 0; j < n; ++j)
                    if (p(j) > 0) {
                        double q = p(j) / sum;
                        entropy -= q * std::log(q);
                    }
                p /= sum;
            }
            double diff = entropy - log_perp;
            if (std::abs(diff) < 1e-7) break;
            if (diff > 0) {
                beta_lo = beta;
                beta = std::isfinite(beta_hi) ? (beta + beta_hi) / 2 : beta * 2;
            } else {
                beta_hi = beta;
                beta = (beta + beta_lo) / 2;
            }
        }
        P.row(i) = p;
    }
    P = (P + P.transpose()) / (2.0 * n);
    P = P.cwiseMax(1e-12);

    CounterRng rng(derive_seed(seed, "tsne-init"));
    Eigen::MatrixXd Y(n, 2);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < 2; ++d) Y(i, d) = 1e-4 * rng.next_gaussian();

    Eigen::MatrixXd dY = Eigen::MatrixXd::Zero(n, 2);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
    const int exaggeration_iters = std::min(250, iters / 4);
    double kl = 0;
    for (int iter = 0; iter < iters; ++iter) {
        double exaggeration = iter < exaggeration_iters ? 12.0 : 1.0;
        double momentum = iter < 250 ? 0.5 : 0.8;

        Eigen::MatrixXd Dy = pairwise_sq_dists(Y);
        Eigen::MatrixXd num = (1.0 + Dy.array()).inverse().matrix();
        num.diagonal().setZero();
        double qsum = std::max(num.sum(), kTiny);

        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, 2);
        kl = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                double pij = exaggeration * P(i, j);
                double qij = std::max(num(i, j) / qsum, 1e-12);
                double mult = (pij - qij) * num(i, j);
                grad.row(i) += 4.0 * mult * (Y.row(i) - Y.row(j));
                if (iter == iters - 1 || exaggeration == 1.0)
                    kl += P(i, j) * std::log(std::max(P(i, j), 1e-12) / qij);
            }
        }

        for (int i = 0; i < n; ++i)
            for (int d = 0; d < 2; ++d) {
                bool same_sign = (grad(i, d) > 0) == (dY(i, d) > 0);
                gains(i, d) = std::max(0.01, same_sign ? gains(i, d) * 0.8 : gains(i, d) + 0.2);
            }
        dY = momentum * dY - 200.0 * gains.cwiseProduct(grad);
        Y += dY;
        Y.rowwise() -= Y.colwise().mean();
    }

    TsneResult r;
    r.Y = std::move(Y);
    r.final_kl = kl;
    return r;
}

}  // namespace boltzfold
