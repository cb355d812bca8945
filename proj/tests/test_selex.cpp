#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "boltzfold/errors.hpp"
#include "boltzfold/selex.hpp"

using namespace boltzfold;

namespace {

SelexRecord rec(const std::string& lib, int round, const std::string& seq, long long count) {
    return {lib, round, seq, count};
}

}  // namespace

TEST_CASE("reads parser maps fields and aggregates duplicates") {
    auto rs = parse_reads_text("N48\t9\tGGGAAACCC\t12\n");
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].library == "N48");
    CHECK(rs[0].round == 9);
    CHECK(rs[0].sequence == "GGGAAACCC");
    CHECK(rs[0].count == 12);

    auto dup = parse_reads_text(
        "N48\t9\tGGGAAACCC\t3\n# comment\n\nN48\t9\tGGGAAACCC\t4\n");
    REQUIRE(dup.size() == 1);
    CHECK(dup[0].count == 7);
}

TEST_CASE("reads parser rejects malformed lines with positions") {
    CHECK_THROWS_AS(parse_reads_text("N48\t9\tGGGAAACCC\t-1\n"), ParseError);
    CHECK_THROWS_AS(parse_reads_text("N48\tnine\tGGGAAACCC\t1\n"), ParseError);
    CHECK_THROWS_AS(parse_reads_text("N48\t9\tGGXAAACCC\t1\n"), ParseError);
    CHECK_THROWS_AS(parse_reads_text("N48\t9\tGGG\n"), ParseError);
    try {
        parse_reads_text("N48\t9\tACGT\t1\nbadline\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("mutation filtering keeps earliest-round survivors per library") {
    std::vector<SelexRecord> records{
        rec("N48", 9, "AAAA", 5),  rec("N48", 13, "AAAA", 9),   // kept: seeded in N48
        rec("N48", 13, "CCCC", 4),                              // dropped: round 13 only
        rec("N58", 5, "CCCC", 2),  rec("N58", 8, "CCCC", 6),    // ...but kept via N58
        rec("N48", 9, "GGGG", 1),                               // kept: in the seed round
    };
    auto kept = filter_mutations(records);
    std::map<std::string, int> per_seq;
    for (const auto& r : kept) ++per_seq[r.sequence];
    CHECK(per_seq.at("AAAA") == 2);
    CHECK(per_seq.at("GGGG") == 1);
    CHECK(per_seq.at("CCCC") == 2);  // the N58 rows survive, the N48 row does not
    for (const auto& r : kept)
        CHECK_FALSE((r.sequence == "CCCC" && r.library == "N48"));

    CHECK_THROWS_AS(filter_mutations({rec("N48", 9, "AAAA", 5)}), ValidationError);
}

TEST_CASE("decile midpoint scores") {
    // one aptamer: sole occupant of the top bin
    std::vector<AptamerProfile> one(1);
    one[0].sequence = "AAAA";
    one[0].cpm_by_library["N48"] = 100.0;
    normalize_counts(one);
    CHECK(one[0].final_cpm_score == doctest::Approx(0.95));

    // ten increasing CPMs: 0.05, 0.15, ..., 0.95
    std::vector<AptamerProfile> ten(10);
    for (int i = 0; i < 10; ++i) {
        ten[i].sequence = std::string(4, 'A' + (i % 4)) + std::to_string(i);
        ten[i].cpm_by_library["N48"] = 10.0 * (i + 1);
    }
    normalize_counts(ten);
    for (int i = 0; i < 10; ++i)
        CHECK(ten[i].final_cpm_score == doctest::Approx(0.05 + 0.1 * i));
    for (const auto& p : ten) {
        CHECK(p.final_cpm_score >= 0.0);
        CHECK(p.final_cpm_score <= 1.0);
    }
}

TEST_CASE("selective pressure spans each library's rounds") {
    std::vector<SelexRecord> records{
        rec("N48", 9, "AAAA", 10), rec("N48", 13, "AAAA", 30),  // rho = 2.0
        rec("N48", 9, "CCCC", 10), rec("N48", 13, "CCCC", 10),  // rho = 0.0
        rec("N48", 9, "GGGG", 10),                              // absent at 13: rho = -1.0
    };
    auto profiles = build_profiles(filter_mutations(records));
    std::map<std::string, const AptamerProfile*> by_seq;
    for (const auto& p : profiles) by_seq[p.sequence] = &p;
    CHECK(by_seq.at("AAAA")->pressure_by_library.at("N48") == doctest::Approx(2.0));
    CHECK(by_seq.at("CCCC")->pressure_by_library.at("N48") == doctest::Approx(0.0));
    CHECK(by_seq.at("GGGG")->pressure_by_library.at("N48") == doctest::Approx(-1.0));
}

TEST_CASE("total pressure sums per-library pressures") {
    std::vector<SelexRecord> records{
        rec("N48", 9, "AAAA", 10), rec("N48", 13, "AAAA", 25),  // 1.5
        rec("N58", 5, "AAAA", 10), rec("N58", 8, "AAAA", 5),    // -0.5
    };
    auto profiles = build_profiles(filter_mutations(records));
    REQUIRE(profiles.size() == 1);
    CHECK(profiles[0].total_pressure == doctest::Approx(1.0));
}

TEST_CASE("nearest rank percentile") {
    std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(nearest_rank_percentile(v, 90.0) == doctest::Approx(9.0));
    CHECK(nearest_rank_percentile(v, 10.0) == doctest::Approx(1.0));
    CHECK(nearest_rank_percentile(v, 100.0) == doctest::Approx(10.0));
    CHECK(nearest_rank_percentile(v, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(nearest_rank_percentile({}, 50.0), ValidationError);
    CHECK_THROWS_AS(nearest_rank_percentile(v, 101.0), ValidationError);
}

TEST_CASE("anomaly labels at the declared tails") {
    std::vector<AptamerProfile> profiles(100);
    for (int i = 0; i < 100; ++i) {
        profiles[i].sequence = "S" + std::to_string(i);
        profiles[i].final_cpm_score = (i + 0.5) / 100.0;
        profiles[i].total_pressure = (i + 0.5) / 100.0;  // correlated baseline
    }
    profiles[99].total_pressure = -5.0;  // high count, lowest pressure
    profiles[0].total_pressure = 5.0;    // low count, highest pressure
    label_anomalies(profiles);
    for (int i = 0; i < 100; ++i) {
        AnomalyLabel want = i == 99 ? AnomalyLabel::HC_LP
                            : i == 0 ? AnomalyLabel::LC_HP
                                     : AnomalyLabel::NONE;
        CHECK(profiles[i].label == want);
    }
}

TEST_CASE("uniform distributions produce no labels") {
    std::vector<AptamerProfile> profiles(20);
    for (int i = 0; i < 20; ++i) {
        profiles[i].sequence = "S" + std::to_string(i);
        profiles[i].final_cpm_score = 0.5;
        profiles[i].total_pressure = 1.0;
    }
    label_anomalies(profiles);
    for (const auto& p : profiles) CHECK(p.label == AnomalyLabel::NONE);

    std::vector<AptamerProfile> too_few(3);
    CHECK_THROWS_AS(label_anomalies(too_few), ValidationError);
}

TEST_CASE("scores are invariant under count doubling") {
    std::vector<SelexRecord> records;
    for (int i = 0; i < 12; ++i) {
        std::string seq = "ACGT";
        for (int b = 0; b < 4; ++b) seq += "ACGT"[(i >> b) & 1 ? 3 - b % 4 : b % 4];
        // counts vary per aptamer so the ranking is non-trivial
        records.push_back(rec("N48", 1, seq, 3 + 7 * i));
        if (i % 2 == 0) records.push_back(rec("N48", 2, seq, 5 + 3 * i));
    }
    auto p1 = build_profiles(filter_mutations(records));
    for (auto& r : records) r.count *= 2;
    auto p2 = build_profiles(filter_mutations(records));
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].sequence == p2[i].sequence);
        CHECK(p1[i].final_cpm_score == doctest::Approx(p2[i].final_cpm_score));
    }
}
