#include "boltzfold/folding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "boltzfold/errors.hpp"
#include "boltzfold/rng.hpp"
#include "boltzfold/structure_graph.hpp"

namespace boltzfold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// Index helpers and per-sequence energy terms shared by the MFE and
// partition-function recursions.
struct EnergyContext {
    const Sequence& seq;
    const EnergyParameters& params;
    int n;
    std::vector<char> pairable;  // n*n, (i,j) legal with hairpin gap

    EnergyContext(const Sequence& s, const EnergyParameters& p)
        : seq(s), params(p), n(s.length()), pairable(static_cast<std::size_t>(n) * n, 0) {
        for (int i = 0; i < n; ++i)
            for (int j = i + params.min_hairpin_unpaired + 1; j < n; ++j)
                if (params.can_pair(s.bases[i], s.bases[j])) pairable[i * n + j] = 1;
    }

    bool can_pair(int i, int j) const { return pairable[i * n + j] != 0; }

    double hairpin(int i, int j) const {
        return params.hairpin_base +
               params.hairpin_per_nt * (j - i - 1 - params.min_hairpin_unpaired);
    }

    // Face closed by (i,j) with single nested pair (k,l): stack, bulge,
    // or internal loop.
    double two_loop(int i, int j, int k, int l) const {
        int left = k - i - 1;
        int right = j - l - 1;
        if (left == 0 && right == 0) {
            std::string key{seq.bases[i], seq.bases[j], '/', seq.bases[k], seq.bases[l]};
            auto it = params.stack_table.find(key);
            if (it == params.stack_table.end())
                throw ValidationError("stack entry " + key + " missing from parameter set");
            return it->second;
        }
        if (left == 0 || right == 0)
            return params.bulge_base + params.bulge_per_nt * std::max(left, right);
        return params.internal_base + params.internal_per_nt * (left + right);
    }

    double ml_a() const { return params.multibranch_offset_a; }
    double ml_b() const { return params.multibranch_per_branch_b; }
    double ml_c() const { return params.multibranch_per_unpaired_c; }
};

// ---------------------------------------------------------------------
// MFE tables. Intervals are closed [i, j]; leftmost-first decomposition.
//   V    : min energy with (i, j) paired
//   WM   : >= 1 multiloop branches filling [i, j]
//   WM2  : >= 2 multiloop branches filling [i, j]
//   Wx   : external suffix minimum over [i, n)
struct MfeTables {
    int n;
    std::vector<double> V, WM, WM2;
    std::vector<double> Wx;

    double& v(int i, int j) { return V[i * n + j]; }
    double& wm(int i, int j) { return WM[i * n + j]; }
    double& wm2(int i, int j) { return WM2[i * n + j]; }
    double vat(int i, int j) const { return V[i * n + j]; }
    double wmat(int i, int j) const { return i > j ? kInf : WM[i * n + j]; }
    double wm2at(int i, int j) const { return i > j ? kInf : WM2[i * n + j]; }

    explicit MfeTables(const EnergyContext& ctx) : n(ctx.n) {
        V.assign(static_cast<std::size_t>(n) * n, kInf);
        WM.assign(static_cast<std::size_t>(n) * n, kInf);
        WM2.assign(static_cast<std::size_t>(n) * n, kInf);
        Wx.assign(n + 1, 0.0);

        for (int span = 1; span < n; ++span) {
            for (int i = 0; i + span < n; ++i) {
                int j = i + span;
                if (ctx.can_pair(i, j)) {
                    double best = ctx.hairpin(i, j);
                    for (int k = i + 1; k < j; ++k)
                        for (int l = k + 1; l < j; ++l) {
                            if (!ctx.can_pair(k, l)) continue;
                            best = std::min(best, ctx.two_loop(i, j, k, l) + vat(k, l));
                        }
                    if (wm2at(i + 1, j - 1) < kInf)
                        best = std::min(best, ctx.ml_a() + wm2at(i + 1, j - 1));
                    v(i, j) = best;
                }
                // WM / WM2 over [i, j]
                double m1 = ctx.ml_c() + wmat(i + 1, j);
                double m2 = ctx.ml_c() + wm2at(i + 1, j);
                for (int k = i + 1; k <= j; ++k) {
                    if (!ctx.can_pair(i, k)) continue;
                    double branch = vat(i, k) + ctx.ml_b();
                    double rest_unpaired = ctx.ml_c() * (j - k);
                    m1 = std::min(m1, branch + std::min(rest_unpaired, wmat(k + 1, j)));
                    m2 = std::min(m2, branch + wmat(k + 1, j));
                }
                wm(i, j) = m1;
                wm2(i, j) = m2;
            }
        }
        for (int i = n - 1; i >= 0; --i) {
            double best = Wx[i + 1];
            for (int k = i + 1; k < n; ++k)
                if (ctx.can_pair(i, k)) best = std::min(best, vat(i, k) + Wx[k + 1]);
            Wx[i] = best;
        }
    }
};

// Lexicographically-least optimal traceback. At every decision the
// earliest possible next pair is taken; hairpins / all-unpaired tails
// beat any continuation that adds pairs.
struct MfeTraceback {
    const EnergyContext& ctx;
    const MfeTables& t;
    SecondaryStructure out;

    MfeTraceback(const EnergyContext& c, const MfeTables& tables)
        : ctx(c), t(tables), out(c.n) {
        external(0);
    }

    void external(int i) {
        while (i < t.n) {
            int best_k = -1;
            for (int k = i + 1; k < t.n; ++k) {
                if (!ctx.can_pair(i, k)) continue;
                if (t.vat(i, k) + t.Wx[k + 1] == t.Wx[i]) {
                    best_k = k;
                    break;
                }
            }
            if (best_k >= 0) {
                out.add_pair(i, best_k);
                pair(i, best_k);
                i = best_k + 1;
            } else {
                ++i;
            }
        }
    }

    // First pair of an optimal multiloop filling of [x, y], or {-1,-1}
    // if none is needed to reach `target`.
    std::pair<int, int> first_wm2_branch(int x, int y, double target) const {
        for (int p = x; p <= y; ++p) {
            double lead = ctx.ml_c() * (p - x);
            for (int k = p + 1; k <= y; ++k) {
                if (!ctx.can_pair(p, k)) continue;
                if (lead + t.vat(p, k) + ctx.ml_b() + t.wmat(k + 1, y) == target) return {p, k};
            }
        }
        return {-1, -1};
    }

    void pair(int i, int j) {
        double v = t.vat(i, j);
        if (v == ctx.hairpin(i, j)) return;

        std::pair<int, int> two{-1, -1};
        for (int k = i + 1; k < j && two.first < 0; ++k)
            for (int l = k + 1; l < j; ++l) {
                if (!ctx.can_pair(k, l)) continue;
                if (ctx.two_loop(i, j, k, l) + t.vat(k, l) == v) {
                    two = {k, l};
                    break;
                }
            }
        std::pair<int, int> multi{-1, -1};
        if (t.wm2at(i + 1, j - 1) < kInf && ctx.ml_a() + t.wm2at(i + 1, j - 1) == v)
            multi = first_wm2_branch(i + 1, j - 1, t.wm2at(i + 1, j - 1));

        bool use_two = two.first >= 0 && (multi.first < 0 || two <= multi);
        if (use_two) {
            out.add_pair(two.first, two.second);
            pair(two.first, two.second);
            return;
        }
        // Multiloop: first branch, then the >= 1 remaining branches.
        auto [p, k] = multi;
        out.add_pair(p, k);
        pair(p, k);
        double rest = t.wm2at(i + 1, j - 1) - ctx.ml_c() * (p - i - 1) - t.vat(p, k) - ctx.ml_b();
        wm_region(k + 1, j - 1, rest);
    }

    void wm_region(int x, int y, double target) {
        // target is the WM value to realize over [x, y].
        for (int p = x; p <= y; ++p) {
            double lead = ctx.ml_c() * (p - x);
            for (int k = p + 1; k <= y; ++k) {
                if (!ctx.can_pair(p, k)) continue;
                double branch = lead + t.vat(p, k) + ctx.ml_b();
                double rest_unpaired = ctx.ml_c() * (y - k);
                if (branch + rest_unpaired == target) {
                    out.add_pair(p, k);
                    pair(p, k);
                    return;  // remaining positions unpaired
                }
                if (branch + t.wmat(k + 1, y) == target) {
                    out.add_pair(p, k);
                    pair(p, k);
                    wm_region(k + 1, y, t.wmat(k + 1, y));
                    return;
                }
            }
        }
        throw ValidationError("internal error: multiloop traceback failed");
    }
};

// ---------------------------------------------------------------------
// Partition-function tables, all in log space.
struct PfTables {
    int n;
    double beta;
    std::vector<double> zb, wm, wm2;  // log weights
    std::vector<double> zf;           // prefix: zf[t] = log Z of s[0..t)
    std::vector<double> zr;           // suffix: zr[t] = log Z of s[t..n)

    double zbat(int i, int j) const { return zb[i * n + j]; }
    double wmat(int i, int j) const { return i > j ? -kInf : wm[i * n + j]; }
    double wm2at(int i, int j) const { return i > j ? -kInf : wm2[i * n + j]; }

    PfTables(const EnergyContext& ctx, const Thermo& thermo) : n(ctx.n), beta(thermo.beta()) {
        zb.assign(static_cast<std::size_t>(n) * n, -kInf);
        wm.assign(static_cast<std::size_t>(n) * n, -kInf);
        wm2.assign(static_cast<std::size_t>(n) * n, -kInf);
        zf.assign(n + 1, 0.0);
        zr.assign(n + 1, 0.0);

        for (int span = 1; span < n; ++span) {
            for (int i = 0; i + span < n; ++i) {
                int j = i + span;
                if (ctx.can_pair(i, j)) {
                    double acc = -beta * ctx.hairpin(i, j);
                    for (int k = i + 1; k < j; ++k)
                        for (int l = k + 1; l < j; ++l) {
                            if (!ctx.can_pair(k, l)) continue;
                            acc = logaddexp(acc,
                                            -beta * ctx.two_loop(i, j, k, l) + zbat(k, l));
                        }
                    acc = logaddexp(acc, -beta * ctx.ml_a() + wm2at(i + 1, j - 1));
                    zb[i * n + j] = acc;
                }
                double m1 = -beta * ctx.ml_c() + wmat(i + 1, j);
                double m2 = -beta * ctx.ml_c() + wm2at(i + 1, j);
                for (int k = i + 1; k <= j; ++k) {
                    if (!ctx.can_pair(i, k)) continue;
                    double branch = zbat(i, k) - beta * ctx.ml_b();
                    double rest_unpaired = -beta * ctx.ml_c() * (j - k);
                    m1 = logaddexp(m1, branch + logaddexp(rest_unpaired, wmat(k + 1, j)));
                    m2 = logaddexp(m2, branch + wmat(k + 1, j));
                }
                wm[i * n + j] = m1;
                wm2[i * n + j] = m2;
            }
        }
        for (int t = 1; t <= n; ++t) {
            double acc = zf[t - 1];
            for (int i = 0; i < t - 1; ++i)
                if (ctx.can_pair(i, t - 1)) acc = logaddexp(acc, zf[i] + zbat(i, t - 1));
            zf[t] = acc;
        }
        for (int i = n - 1; i >= 0; --i) {
            double acc = zr[i + 1];
            for (int k = i + 1; k < n; ++k)
                if (ctx.can_pair(i, k)) acc = logaddexp(acc, zbat(i, k) + zr[k + 1]);
            zr[i] = acc;
        }
    }

    double log_z() const { return zf[n]; }
};

// Stochastic traceback of one structure from the conditional
// probabilities of the partition-function decomposition.
struct PfSampler {
    const EnergyContext& ctx;
    const PfTables& t;
    CounterRng& rng;

    SecondaryStructure sample() {
        SecondaryStructure s(ctx.n);
        external(0, s);
        return s;
    }

    // Picks index by cumulative log-weights normalized to total.
    int pick(const std::vector<double>& logw, double log_total) {
        double u = rng.next_double();
        double cum = 0.0;
        for (std::size_t i = 0; i < logw.size(); ++i) {
            cum += std::exp(logw[i] - log_total);
            if (u < cum) return static_cast<int>(i);
        }
        return static_cast<int>(logw.size()) - 1;  // rounding tail
    }

    void external(int i, SecondaryStructure& s) {
        while (i < ctx.n) {
            std::vector<double> logw{t.zr[i + 1]};
            std::vector<int> partner{-1};
            for (int k = i + 1; k < ctx.n; ++k)
                if (ctx.can_pair(i, k)) {
                    logw.push_back(t.zbat(i, k) + t.zr[k + 1]);
                    partner.push_back(k);
                }
            int c = pick(logw, t.zr[i]);
            if (partner[c] < 0) {
                ++i;
            } else {
                s.add_pair(i, partner[c]);
                pair(i, partner[c], s);
                i = partner[c] + 1;
            }
        }
    }

    void pair(int i, int j, SecondaryStructure& s) {
        std::vector<double> logw{-t.beta * ctx.hairpin(i, j)};
        std::vector<std::pair<int, int>> child{{-1, -1}};
        for (int k = i + 1; k < j; ++k)
            for (int l = k + 1; l < j; ++l) {
                if (!ctx.can_pair(k, l)) continue;
                logw.push_back(-t.beta * ctx.two_loop(i, j, k, l) + t.zbat(k, l));
                child.push_back({k, l});
            }
        logw.push_back(-t.beta * ctx.ml_a() + t.wm2at(i + 1, j - 1));
        child.push_back({-2, -2});

        int c = pick(logw, t.zbat(i, j));
        if (child[c].first == -1) return;  // hairpin
        if (child[c].first >= 0) {
            auto [k, l] = child[c];
            s.add_pair(k, l);
            pair(k, l, s);
            return;
        }
        wm2_region(i + 1, j - 1, s);
    }

    void wm2_region(int x, int y, SecondaryStructure& s) {
        // unpaired-lead + first branch, then a WM region.
        std::vector<double> logw{-t.beta * ctx.ml_c() + t.wm2at(x + 1, y)};
        std::vector<int> partner{-1};
        for (int k = x + 1; k <= y; ++k)
            if (ctx.can_pair(x, k)) {
                logw.push_back(t.zbat(x, k) - t.beta * ctx.ml_b() + t.wmat(k + 1, y));
                partner.push_back(k);
            }
        int c = pick(logw, t.wm2at(x, y));
        if (partner[c] < 0) {
            wm2_region(x + 1, y, s);
            return;
        }
        s.add_pair(x, partner[c]);
        pair(x, partner[c], s);
        wm_region(partner[c] + 1, y, s);
    }

    void wm_region(int x, int y, SecondaryStructure& s) {
        std::vector<double> logw{-t.beta * ctx.ml_c() + t.wmat(x + 1, y)};
        std::vector<std::pair<int, int>> choice{{-1, 0}};  // x unpaired
        for (int k = x + 1; k <= y; ++k)
            if (ctx.can_pair(x, k)) {
                double branch = t.zbat(x, k) - t.beta * ctx.ml_b();
                logw.push_back(branch - t.beta * ctx.ml_c() * (y - k));
                choice.push_back({k, 0});  // rest unpaired
                logw.push_back(branch + t.wmat(k + 1, y));
                choice.push_back({k, 1});  // more branches
            }
        int c = pick(logw, t.wmat(x, y));
        if (choice[c].first < 0) {
            wm_region(x + 1, y, s);
            return;
        }
        int k = choice[c].first;
        s.add_pair(x, k);
        pair(x, k, s);
        if (choice[c].second == 1) wm_region(k + 1, y, s);
    }
};

void check_limit(const Sequence& seq, int limit, const char* op) {
    if (seq.length() > limit)
        throw ValidationError(std::string(op) + " refuses length " +
                              std::to_string(seq.length()) + " > exhaustive limit " +
                              std::to_string(limit));
}

}  // namespace

double structure_energy(const Sequence& seq, const SecondaryStructure& structure,
                        const EnergyParameters& params) {
    double total = 0.0;
    for (const Face& f : extract_faces(build_graph(seq, structure), params)) total += f.energy;
    return total;
}

std::pair<SecondaryStructure, double> fold_mfe(const Sequence& seq,
                                               const EnergyParameters& params) {
    seq.validate();
    EnergyContext ctx(seq, params);
    MfeTables tables(ctx);
    if (tables.Wx[0] >= 0.0) {
        // No pairing improves on the empty structure; empty wins ties
        // (its pair list is the lexicographic minimum).
        if (tables.Wx[0] > 0.0)
            throw ValidationError("internal error: positive external minimum");
        return {SecondaryStructure(seq.length()), 0.0};
    }
    MfeTraceback tb(ctx, tables);
    return {tb.out, tables.Wx[0]};
}

std::vector<std::pair<SecondaryStructure, double>> enumerate_structures(
    const Sequence& seq, const EnergyParameters& params, int limit) {
    seq.validate();
    check_limit(seq, limit, "enumerate_structures");
    EnergyContext ctx(seq, params);
    int n = ctx.n;

    // All pair sets for [i, j], built leftmost-first. Intentionally
    // independent of the DP recursions above.
    std::vector<std::vector<std::vector<std::pair<int, int>>>> memo(
        static_cast<std::size_t>(n) * (n + 1));
    std::vector<char> done(static_cast<std::size_t>(n) * (n + 1), 0);
    auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + (j + 1); };

    std::function<const std::vector<std::vector<std::pair<int, int>>>&(int, int)> region =
        [&](int i, int j) -> const std::vector<std::vector<std::pair<int, int>>>& {
        std::size_t key = idx(i, std::min(j, n - 1));
        if (i > j) {
            static const std::vector<std::vector<std::pair<int, int>>> empty{{}};
            return empty;
        }
        if (done[key]) return memo[key];
        std::vector<std::vector<std::pair<int, int>>> out;
        for (const auto& rest : region(i + 1, j)) out.push_back(rest);
        for (int k = i + 1; k <= j; ++k) {
            if (!ctx.can_pair(i, k)) continue;
            for (const auto& inner : region(i + 1, k - 1))
                for (const auto& outer : region(k + 1, j)) {
                    std::vector<std::pair<int, int>> s{{i, k}};
                    s.insert(s.end(), inner.begin(), inner.end());
                    s.insert(s.end(), outer.begin(), outer.end());
                    out.push_back(std::move(s));
                }
        }
        memo[key] = std::move(out);
        done[key] = 1;
        return memo[key];
    };

    std::vector<std::pair<SecondaryStructure, double>> result;
    for (const auto& pair_set : region(0, n - 1)) {
        SecondaryStructure s(n);
        for (auto [i, j] : pair_set) s.add_pair(i, j);
        result.emplace_back(s, structure_energy(seq, s, params));
    }
    return result;
}

std::pair<double, double> partition_function(const Sequence& seq,
                                             const EnergyParameters& params,
                                             const Thermo& thermo) {
    seq.validate();
    thermo.validate();
    EnergyContext ctx(seq, params);
    PfTables t(ctx, thermo);
    double z = std::exp(t.log_z());
    double g = -thermo.boltzmann_constant * thermo.temperature_kelvin * t.log_z();
    return {z, g};
}

PairProbabilityMatrix base_pair_probabilities(const Sequence& seq,
                                              const EnergyParameters& params,
                                              const Thermo& thermo) {
    seq.validate();
    thermo.validate();
    EnergyContext ctx(seq, params);
    PfTables t(ctx, thermo);
    int n = ctx.n;
    double beta = t.beta;

    // Outside values, accumulated from enclosing pairs processed in
    // decreasing span order.
    std::vector<double> zbout(static_cast<std::size_t>(n) * n, -kInf);
    for (int span = n - 1; span >= 1; --span) {
        for (int p = 0; p + span < n; ++p) {
            int q = p + span;
            if (!ctx.can_pair(p, q)) continue;
            double& out = zbout[p * n + q];
            // External context.
            out = logaddexp(out, t.zf[p] + t.zr[q + 1]);
            if (t.zbat(p, q) == -kInf) continue;
            double ml_base = out - beta * (ctx.ml_a() + ctx.ml_b());
            for (int i = p + 1; i < q; ++i)
                for (int j = i + 1; j < q; ++j) {
                    if (!ctx.can_pair(i, j)) continue;
                    double& inner = zbout[i * n + j];
                    // Two-loop face.
                    inner = logaddexp(inner, out - beta * ctx.two_loop(p, q, i, j));
                    // Branch of a multiloop closed by (p, q): at least
                    // one more branch left or right.
                    double left_un = -beta * ctx.ml_c() * (i - 1 - p);
                    double right_un = -beta * ctx.ml_c() * (q - 1 - j);
                    double left_wm = t.wmat(p + 1, i - 1);
                    double right_wm = t.wmat(j + 1, q - 1);
                    double ways = logaddexp(logaddexp(left_wm + right_un, left_un + right_wm),
                                            left_wm + right_wm);
                    inner = logaddexp(inner, ml_base + ways);
                }
        }
    }

    PairProbabilityMatrix m;
    m.n = n;
    m.p_pair.assign(static_cast<std::size_t>(n) * n, 0.0);
    m.p_unpaired.assign(n, 1.0);
    double log_z = t.log_z();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (!ctx.can_pair(i, j) || t.zbat(i, j) == -kInf) continue;
            double lp = t.zbat(i, j) + zbout[i * n + j] - log_z;
            double p = lp == -kInf ? 0.0 : std::exp(lp);
            m.p_pair[i * n + j] = p;
            m.p_unpaired[i] -= p;
            m.p_unpaired[j] -= p;
        }
    return m;
}

EnsembleDistribution exhaustive_ensemble(const Sequence& seq, const EnergyParameters& params,
                                         const Thermo& thermo, int limit) {
    thermo.validate();
    check_limit(seq, limit, "exhaustive_ensemble");
    auto all = enumerate_structures(seq, params, limit);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first.pairs() < b.first.pairs();
    });

    double beta = thermo.beta();
    double log_z = -kInf;
    for (const auto& [s, e] : all) log_z = logaddexp(log_z, -beta * e);

    EnsembleDistribution d;
    d.mode = EnsembleMode::Exhaustive;
    d.partition_value = std::exp(log_z);
    d.ensemble_free_energy = -thermo.boltzmann_constant * thermo.temperature_kelvin * log_z;
    for (auto& [s, e] : all)
        d.entries.push_back({std::move(s), e, std::exp(-beta * e - log_z)});
    return d;
}

EnsembleDistribution sampled_ensemble(const Sequence& seq, const EnergyParameters& params,
                                      const Thermo& thermo, int n_samples, std::uint64_t seed) {
    seq.validate();
    thermo.validate();
    if (n_samples <= 0) throw ValidationError("sampled ensemble requires n_samples >= 1");
    EnergyContext ctx(seq, params);
    PfTables t(ctx, thermo);
    CounterRng rng(seed);
    PfSampler sampler{ctx, t, rng};

    EnsembleDistribution d;
    d.mode = EnsembleMode::Sampled;
    d.sample_count = n_samples;
    d.seed = seed;
    d.partition_value = std::exp(t.log_z());
    d.ensemble_free_energy = -thermo.boltzmann_constant * thermo.temperature_kelvin * t.log_z();

    std::map<std::string, int> freq;
    std::vector<std::string> keys;
    for (int i = 0; i < n_samples; ++i) {
        SecondaryStructure s = sampler.sample();
        double e = structure_energy(seq, s, params);
        std::string db = s.dot_bracket();
        freq[db] += 1;
        keys.push_back(db);
        d.entries.push_back({std::move(s), e, 0.0});
    }
    for (int i = 0; i < n_samples; ++i)
        d.entries[i].probability = static_cast<double>(freq[keys[i]]) / n_samples;
    return d;
}

EnsembleDistribution boltzmann_ensemble(const Sequence& seq, const EnergyParameters& params,
                                        const Thermo& thermo, int n_samples, std::uint64_t seed,
                                        int limit) {
    seq.validate();
    if (seq.length() <= limit) return exhaustive_ensemble(seq, params, thermo, limit);
    return sampled_ensemble(seq, params, thermo, n_samples, seed);
}

}  // namespace boltzfold
