#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"
#include "boltzfold/folding.hpp"
#include "boltzfold/rng.hpp"

using namespace boltzfold;

namespace {

const EnergyParameters& toy() {
    static EnergyParameters p = toy_parameters();
    return p;
}

Sequence random_sequence(CounterRng& rng, int min_len, int max_len) {
    static const char bases[4] = {'A', 'C', 'G', 'T'};
    int len = min_len + static_cast<int>(rng.next_double() * (max_len - min_len + 1));
    std::string s;
    for (int i = 0; i < len; ++i) s += bases[rng.next_u64() % 4];
    return Sequence{"r", s};
}

}  // namespace

TEST_CASE("mfe oracle examples") {
    Thermo t;
    auto [s1, e1] = fold_mfe(Sequence{"a", "AAAA"}, toy());
    CHECK(s1.dot_bracket() == "....");
    CHECK(e1 == doctest::Approx(0.0));

    auto [s2, e2] = fold_mfe(Sequence{"b", "GGGAAACCC"}, toy());
    CHECK(s2.dot_bracket() == "(((...)))");
    CHECK(e2 == doctest::Approx(-1.0));

    auto [s3, e3] = fold_mfe(Sequence{"c", "GAAC"}, toy());  // too short to pair
    CHECK(s3.dot_bracket() == "....");
    CHECK(e3 == doctest::Approx(0.0));
}

TEST_CASE("enumeration is exhaustive and bounded") {
    auto one = enumerate_structures(Sequence{"a", "AAAA"}, toy());
    REQUIRE(one.size() == 1);
    CHECK(one[0].first.pair_count() == 0);
    CHECK(one[0].second == doctest::Approx(0.0));

    auto all = enumerate_structures(Sequence{"b", "GGGAAACCC"}, toy());
    bool has_mfe = false, has_empty = false;
    for (const auto& [s, e] : all) {
        if (s.dot_bracket() == "(((...)))") {
            has_mfe = true;
            CHECK(e == doctest::Approx(-1.0));
        }
        if (s.pair_count() == 0) has_empty = true;
        CHECK_NOTHROW(s.validate(Sequence{"b", "GGGAAACCC"}, toy()));
    }
    CHECK(has_mfe);
    CHECK(has_empty);

    CHECK_THROWS_AS(enumerate_structures(Sequence{"c", std::string(31, 'A')}, toy()),
                    ValidationError);
}

TEST_CASE("mfe equals the enumeration minimum on random sequences") {
    Thermo t;
    CounterRng rng(101);
    for (int rep = 0; rep < 25; ++rep) {
        Sequence s = random_sequence(rng, 8, 16);
        auto [mfe_s, mfe_e] = fold_mfe(s, toy());
        double best = 0.0;
        for (const auto& [st, e] : enumerate_structures(s, toy()))
            best = std::min(best, e);
        CHECK(mfe_e == doctest::Approx(best).epsilon(1e-12));
        CHECK(structure_energy(s, mfe_s, toy()) == doctest::Approx(mfe_e));
    }
}

TEST_CASE("partition function matches the explicit Boltzmann sum") {
    Thermo t;
    auto [z0, g0] = partition_function(Sequence{"a", "AAAA"}, toy(), t);
    CHECK(z0 == doctest::Approx(1.0));
    CHECK(g0 == doctest::Approx(0.0));

    CounterRng rng(202);
    for (int rep = 0; rep < 15; ++rep) {
        Sequence s = random_sequence(rng, 8, 16);
        auto [z, g] = partition_function(s, toy(), t);
        double ref = 0.0;
        for (const auto& [st, e] : enumerate_structures(s, toy()))
            ref += std::exp(-t.beta() * e);
        CHECK(z == doctest::Approx(ref).epsilon(1e-9));
        CHECK(g == doctest::Approx(-t.boltzmann_constant * t.temperature_kelvin * std::log(z)));
        CHECK(z >= 1.0);
    }
}

TEST_CASE("pair probabilities match enumeration and normalize") {
    Thermo t;
    PairProbabilityMatrix m0 = base_pair_probabilities(Sequence{"a", "AAAA"}, toy(), t);
    for (int i = 0; i < 4; ++i) CHECK(m0.p_unpaired[i] == doctest::Approx(1.0));

    CounterRng rng(303);
    for (int rep = 0; rep < 10; ++rep) {
        Sequence s = random_sequence(rng, 8, 14);
        PairProbabilityMatrix m = base_pair_probabilities(s, toy(), t);

        // brute-force reference
        std::map<std::pair<int, int>, double> ref;
        std::vector<double> ref_unpaired(s.length(), 0.0);
        double z = 0.0;
        auto all = enumerate_structures(s, toy());
        for (const auto& [st, e] : all) z += std::exp(-t.beta() * e);
        for (const auto& [st, e] : all) {
            double p = std::exp(-t.beta() * e) / z;
            for (auto pr : st.pairs()) ref[pr] += p;
            for (int i = 0; i < s.length(); ++i)
                if (!st.paired(i)) ref_unpaired[i] += p;
        }

        for (int i = 0; i < s.length(); ++i) {
            double row = m.p_unpaired[i];
            for (int j = 0; j < s.length(); ++j)
                if (j != i) row += m.pair(i, j);
            CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(m.p_unpaired[i] == doctest::Approx(ref_unpaired[i]).epsilon(1e-8));
        }
        for (const auto& [pr, p] : ref)
            CHECK(m.pair(pr.first, pr.second) == doctest::Approx(p).epsilon(1e-8));
    }
}

TEST_CASE("exhaustive ensemble carries exact Boltzmann weights") {
    Thermo t;
    EnsembleDistribution ens = exhaustive_ensemble(Sequence{"b", "GGGAAACCC"}, toy(), t);
    CHECK(ens.mode == EnsembleMode::Exhaustive);

    double total = 0.0;
    double p_mfe = 0.0;
    for (const EnsembleEntry& e : ens.entries) {
        total += e.probability;
        CHECK(e.probability ==
              doctest::Approx(std::exp(-t.beta() * e.energy) / ens.partition_value));
        if (e.structure.dot_bracket() == "(((...)))") p_mfe = e.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p_mfe == doctest::Approx(std::exp(t.beta() * 1.0) / ens.partition_value));

    // ERGM form: probability ratios depend only on the energy gap
    for (std::size_t a = 0; a + 1 < ens.entries.size(); a += 2) {
        const auto& g1 = ens.entries[a];
        const auto& g2 = ens.entries[a + 1];
        CHECK(g1.probability / g2.probability ==
              doctest::Approx(std::exp(-t.beta() * (g1.energy - g2.energy))).epsilon(1e-9));
    }
}

TEST_CASE("degenerate sampling returns identical copies") {
    Thermo t;
    EnsembleDistribution ens = sampled_ensemble(Sequence{"a", "AAAA"}, toy(), t, 100, 9);
    CHECK(ens.mode == EnsembleMode::Sampled);
    CHECK(ens.sample_count == 100);
    REQUIRE(ens.entries.size() == 100);
    for (const EnsembleEntry& e : ens.entries) {
        CHECK(e.structure.pair_count() == 0);
        CHECK(e.probability == doctest::Approx(1.0));
    }
}

TEST_CASE("sampling is deterministic by seed and tracks the exact distribution") {
    Thermo t;
    Sequence s{"b", "GGGAAACCC"};
    EnsembleDistribution a = sampled_ensemble(s, toy(), t, 2000, 7);
    EnsembleDistribution b = sampled_ensemble(s, toy(), t, 2000, 7);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        CHECK(a.entries[i].structure.pair_table == b.entries[i].structure.pair_table);

    EnsembleDistribution c = sampled_ensemble(s, toy(), t, 2000, 8);
    bool any_diff = false;
    for (std::size_t i = 0; i < c.entries.size(); ++i)
        any_diff |= c.entries[i].structure.pair_table != a.entries[i].structure.pair_table;
    CHECK(any_diff);

    // empirical MFE frequency within binomial noise of the exact value
    EnsembleDistribution exact = exhaustive_ensemble(s, toy(), t);
    double p = 0.0;
    for (const EnsembleEntry& e : exact.entries)
        if (e.structure.dot_bracket() == "(((...)))") p = e.probability;
    int hits = 0;
    for (const EnsembleEntry& e : a.entries)
        hits += e.structure.dot_bracket() == "(((...)))";
    double freq = hits / 2000.0;
    double sigma = std::sqrt(p * (1 - p) / 2000.0);
    CHECK(std::abs(freq - p) <= 4 * sigma);
    // per-structure empirical probabilities are the observed frequencies
    for (const EnsembleEntry& e : a.entries)
        if (e.structure.dot_bracket() == "(((...)))")
            CHECK(e.probability == doctest::Approx(freq));
}

TEST_CASE("boltzmann_ensemble switches modes at the enumeration limit") {
    Thermo t;
    EnsembleDistribution small = boltzmann_ensemble(Sequence{"s", "GGGAAACCC"}, toy(), t, 50, 1);
    CHECK(small.mode == EnsembleMode::Exhaustive);
    EnsembleDistribution big =
        boltzmann_ensemble(Sequence{"s", std::string(35, 'A')}, toy(), t, 50, 1);
    CHECK(big.mode == EnsembleMode::Sampled);
    CHECK(big.entries.size() == 50);
}
