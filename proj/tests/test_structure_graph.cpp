#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"
#include "boltzfold/structure_graph.hpp"

using namespace boltzfold;

namespace {

StructureGraph graph_of(const std::string& bases, const std::string& db) {
    return build_graph(Sequence{"t", bases}, SecondaryStructure::from_dot_bracket(db));
}

}  // namespace

TEST_CASE("graph counts follow the sequence and pairing") {
    StructureGraph g1 = graph_of("AAAA", "....");
    CHECK(g1.node_count() == 4);
    CHECK(g1.path_edge_count() == 3);
    CHECK(g1.pair_edge_count() == 0);

    StructureGraph g2 = graph_of("GGGAAACCC", "(((...)))");
    CHECK(g2.node_count() == 9);
    CHECK(g2.path_edge_count() == 8);
    CHECK(g2.pair_edge_count() == 3);

    CHECK_THROWS_AS(build_graph(Sequence{"t", "GG"}, SecondaryStructure::from_dot_bracket("....")),
                    ValidationError);
}

TEST_CASE("face classification covers the loop taxonomy") {
    CHECK(classify_face({0, 9}, {{1, 8}}) == FaceType::STACK);
    CHECK(classify_face({0, 9}, {}) == FaceType::HAIRPIN);
    CHECK(classify_face({0, 9}, {{1, 6}}) == FaceType::BULGE);    // flush left, gap right
    CHECK(classify_face({0, 9}, {{3, 8}}) == FaceType::BULGE);    // gap left, flush right
    CHECK(classify_face({0, 9}, {{2, 7}}) == FaceType::INTERNAL);
    CHECK(classify_face({0, 20}, {{1, 5}, {6, 10}}) == FaceType::MULTIBRANCH);
}

TEST_CASE("one face per pair with the frozen hairpin-stem decomposition") {
    EnergyParameters p = toy_parameters();
    StructureGraph g = graph_of("GGGAAACCC", "(((...)))");
    std::vector<Face> faces = extract_faces(g, p);
    REQUIRE(faces.size() == 3);

    std::map<std::pair<int, int>, const Face*> by_pair;
    for (const Face& f : faces) by_pair[f.defining_pair] = &f;
    CHECK(by_pair.at({0, 8})->face_type == FaceType::STACK);
    CHECK(by_pair.at({1, 7})->face_type == FaceType::STACK);
    CHECK(by_pair.at({2, 6})->face_type == FaceType::HAIRPIN);
    CHECK(by_pair.at({0, 8})->energy == doctest::Approx(-2.0));
    CHECK(by_pair.at({2, 6})->energy == doctest::Approx(3.0));
    CHECK(by_pair.at({2, 6})->unpaired_lengths == std::vector<int>{3});

    CHECK(extract_faces(graph_of("AAAA", "...."), p).empty());
}

TEST_CASE("face keys carry type, lengths, and rounded energy") {
    EnergyParameters p = toy_parameters();
    StructureGraph g = graph_of("GGGAAACCC", "(((...)))");
    std::map<std::string, int> key_counts;
    for (const Face& f : extract_faces(g, p)) ++key_counts[face_energy_key(f)];
    CHECK(key_counts.at("STACK@-2.0") == 2);
    CHECK(key_counts.at("HAIRPIN:3@+3.0") == 1);
}

TEST_CASE("table-style labels name lengths and closing nucleotides") {
    EnergyParameters p = toy_parameters();
    StructureGraph g = graph_of("GGGAAACCC", "(((...)))");
    std::map<std::pair<int, int>, std::string> labels;
    for (const Face& f : extract_faces(g, p)) labels[f.defining_pair] = f.label_key;
    CHECK(labels.at({0, 8}) == "STACK:GC/GC");
    CHECK(labels.at({2, 6}) == "HAIRPIN:3:GC");
}

TEST_CASE("motzkin paths are the running pairing sums") {
    CHECK(motzkin_path(SecondaryStructure::from_dot_bracket("(((...)))")).y_values ==
          std::vector<int>{1, 2, 3, 3, 3, 3, 2, 1, 0});
    CHECK(motzkin_path(SecondaryStructure::from_dot_bracket(".........")).y_values ==
          std::vector<int>{0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(motzkin_path(SecondaryStructure::from_dot_bracket("((...))")).y_values ==
          std::vector<int>{1, 2, 2, 2, 2, 1, 0});
    CHECK(motzkin_path(SecondaryStructure()).y_values.empty());
}

TEST_CASE("radius-0 neighborhoods are the single rooted node") {
    StructureGraph g = graph_of("GGGAAACCC", "(((...)))");
    NeighborhoodKey k0 = rooted_neighborhood_key(g, 0, 0);
    NeighborhoodKey k5 = rooted_neighborhood_key(g, 5, 0);
    CHECK(k0 == k5);  // node labels are dropped, only shape remains
}

TEST_CASE("neighborhood keys separate structural roles") {
    StructureGraph chain = graph_of("AAAAAA", "......");
    NeighborhoodKey end = rooted_neighborhood_key(chain, 0, 1);
    NeighborhoodKey interior = rooted_neighborhood_key(chain, 3, 1);
    CHECK(!(end == interior));
    CHECK(rooted_neighborhood_key(chain, 5, 1) == end);
    CHECK(rooted_neighborhood_key(chain, 2, 1) == interior);

    // paired vs unpaired centers differ at radius 1
    StructureGraph hp = graph_of("GGGAAACCC", "(((...)))");
    CHECK(!(rooted_neighborhood_key(hp, 1, 1) == rooted_neighborhood_key(hp, 4, 1)));
}

TEST_CASE("mirror-symmetric centers share a key") {
    StructureGraph hp = graph_of("GGGAAACCC", "(((...)))");
    // positions 3 and 7 (1-based) flank the stem symmetrically
    CHECK(rooted_neighborhood_key(hp, 2, 1) == rooted_neighborhood_key(hp, 6, 1));
    CHECK(rooted_neighborhood_key(hp, 1, 2) == rooted_neighborhood_key(hp, 7, 2));
    CHECK(rooted_neighborhood_key(hp, 3, 1) == rooted_neighborhood_key(hp, 5, 1));
}

TEST_CASE("out-of-range centers and negative radii are rejected") {
    StructureGraph g = graph_of("AAAA", "....");
    CHECK_THROWS_AS(rooted_neighborhood_key(g, -1, 1), ValidationError);
    CHECK_THROWS_AS(rooted_neighborhood_key(g, 4, 1), ValidationError);
    CHECK_THROWS_AS(rooted_neighborhood_key(g, 0, -1), ValidationError);
}
