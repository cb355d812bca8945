#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"
#include "boltzfold/fingerprint.hpp"
#include "boltzfold/folding.hpp"

using namespace boltzfold;

namespace {

const EnergyParameters& toy() {
    static EnergyParameters p = toy_parameters();
    return p;
}

FeatureDictionary face_dict_of(const Sequence& seq, const EnsembleDistribution& ens) {
    return build_dictionary({{seq, &ens}}, FeatureKind::FACE, toy(), 0);
}

}  // namespace

TEST_CASE("bag of faces counts the frozen hairpin decomposition") {
    Thermo t;
    Sequence s{"b", "GGGAAACCC"};
    EnsembleDistribution ens = exhaustive_ensemble(s, toy(), t);
    FeatureDictionary dict = face_dict_of(s, ens);

    StructureGraph g = build_graph(s, SecondaryStructure::from_dot_bracket("(((...)))"));
    Fingerprint fp = bag_of_faces(g, toy(), dict);
    CHECK(fp.values.at(dict.column("STACK@-2.0")) == doctest::Approx(2.0));
    CHECK(fp.values.at(dict.column("HAIRPIN:3@+3.0")) == doctest::Approx(1.0));
    CHECK(fp.sum() == doctest::Approx(3.0));  // one face per pair
    CHECK(fp.dropped_features == 0);

    StructureGraph empty = build_graph(s, SecondaryStructure(9));
    CHECK(bag_of_faces(empty, toy(), dict).sum() == doctest::Approx(0.0));
}

TEST_CASE("off-dictionary features are dropped and counted") {
    FeatureDictionary dict;
    dict.kind = FeatureKind::FACE;
    dict.entries = {"STACK@-2.0"};
    dict.rebuild_index();
    Sequence s{"b", "GGGAAACCC"};
    StructureGraph g = build_graph(s, SecondaryStructure::from_dot_bracket("(((...)))"));
    Fingerprint fp = bag_of_faces(g, toy(), dict);
    CHECK(fp.sum() == doctest::Approx(2.0));
    CHECK(fp.dropped_features == 1);  // the hairpin key
}

TEST_CASE("kmer dictionary and counts") {
    FeatureDictionary d4 = kmer_dictionary(4);
    CHECK(d4.size() == 256);
    CHECK(d4.entries.front() == "AAAA");
    CHECK(d4.entries.back() == "TTTT");

    Fingerprint f1 = kmer_counts(Sequence{"a", "AAAA"}, 4, d4);
    CHECK(f1.values.size() == 1);
    CHECK(f1.values.at(d4.column("AAAA")) == doctest::Approx(1.0));

    Fingerprint f2 = kmer_counts(Sequence{"b", "GGGAAACCC"}, 4, d4);
    CHECK(f2.values.size() == 6);
    for (const auto& [c, v] : f2.values) CHECK(v == doctest::Approx(1.0));
    CHECK(f2.sum() == doctest::Approx(6.0));

    CHECK_THROWS_AS(kmer_counts(Sequence{"c", "AC"}, 4, d4), ValidationError);
}

TEST_CASE("degenerate ensembles reproduce the single fingerprint") {
    Thermo t;
    Sequence s{"a", "AAAA"};
    EnsembleDistribution ens = exhaustive_ensemble(s, toy(), t);
    FeatureDictionary dict = face_dict_of(s, ens);
    CHECK(dict.size() == 0);  // unpairable corpus: empty face dictionary
    Fingerprint fp = expected_bag_of_faces(s, ens, toy(), dict);
    CHECK(fp.sum() == doctest::Approx(0.0));
}

TEST_CASE("expected fingerprints equal the oracle weighted sum") {
    Thermo t;
    Sequence s{"b", "GGGAAACCC"};
    EnsembleDistribution ens = exhaustive_ensemble(s, toy(), t);
    FeatureDictionary dict = face_dict_of(s, ens);

    Fingerprint got = expected_bag_of_faces(s, ens, toy(), dict);

    std::vector<double> ref(dict.size(), 0.0);
    for (const EnsembleEntry& e : ens.entries) {
        StructureGraph g = build_graph(s, e.structure);
        for (const Face& f : extract_faces(g, toy()))
            ref[dict.column(face_energy_key(f))] += e.probability;
    }
    std::vector<double> dense = got.dense();
    REQUIRE(dense.size() == ref.size());
    for (std::size_t c = 0; c < ref.size(); ++c)
        CHECK(dense[c] == doctest::Approx(ref[c]).epsilon(1e-12));
}

TEST_CASE("dictionary building is deterministic and sorted") {
    Thermo t;
    Sequence s{"b", "GGGAAACCC"};
    EnsembleDistribution ens = exhaustive_ensemble(s, toy(), t);
    FeatureDictionary d1 = face_dict_of(s, ens);
    FeatureDictionary d2 = face_dict_of(s, ens);
    CHECK(d1.entries == d2.entries);
    CHECK(std::is_sorted(d1.entries.begin(), d1.entries.end()));

    FeatureDictionary nbh = build_dictionary({{s, &ens}}, FeatureKind::NEIGHBORHOOD, toy(), 1);
    CHECK(nbh.size() > 0);
    CHECK_THROWS_AS(build_dictionary({}, FeatureKind::FACE, toy(), 0), ValidationError);
}

TEST_CASE("assemble_matrix concatenates named segments") {
    Thermo t;
    Sequence s{"b", "GGGAAACCC"};
    EnsembleDistribution ens = exhaustive_ensemble(s, toy(), t);
    FeatureDictionary face = face_dict_of(s, ens);
    FeatureDictionary km = kmer_dictionary(4);

    MatrixSegmentSpec fs{"FACE", &face, {expected_bag_of_faces(s, ens, toy(), face)}};
    MatrixSegmentSpec ks{"KMER", &km, {kmer_counts(s, 4, km)}};
    FeatureMatrix m = assemble_matrix({"b"}, {fs, ks});
    CHECK(m.rows() == 1);
    CHECK(m.cols() == face.size() + 256);
    REQUIRE(m.segments.size() == 2);
    CHECK(m.segments[0].name == "FACE");
    CHECK(m.segments[1].end - m.segments[1].begin == 256);
    CHECK(m.column_keys[m.segments[1].begin] == "KMER:AAAA");

    CHECK_THROWS_AS(assemble_matrix({}, {fs}), ValidationError);
    MatrixSegmentSpec mismatched{"KMER", &km, {}};
    CHECK_THROWS_AS(assemble_matrix({"b"}, {mismatched}), ValidationError);
}

TEST_CASE("epsilon neighborhoods are closed balls around the query") {
    std::vector<std::vector<double>> data{{0.0, 0.0}, {0.5, 0.0}, {1.5, 0.0}};
    CHECK(epsilon_neighborhood(data, 0, 0.0) == std::vector<int>{0});
    CHECK(epsilon_neighborhood(data, 0, 1.0) == std::vector<int>{0, 1});
    CHECK(epsilon_neighborhood(data, 0, 2.0) == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(epsilon_neighborhood(data, 5, 1.0), ValidationError);
    CHECK_THROWS_AS(epsilon_neighborhood(data, 0, -1.0), ValidationError);

    // identical Motzkin vectors are mutual members at epsilon 0
    MotzkinVector a{{1, 1, 0}}, b{{1, 1, 0}}, c{{0, 0, 0}};
    CHECK(epsilon_neighborhood(std::vector<MotzkinVector>{a, b, c}, 0, 0.0) ==
          std::vector<int>{0, 1});
}
