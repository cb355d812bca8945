#ifndef BOLTZFOLD_STRUCTURE_GRAPH_HPP
#define BOLTZFOLD_STRUCTURE_GRAPH_HPP

#include <string>
#include <utility>
#include <vector>

#include "boltzfold/sequence.hpp"

namespace boltzfold {

struct EnergyParameters;

enum class FaceType { STACK, HAIRPIN, INTERNAL, BULGE, MULTIBRANCH };

const char* face_type_name(FaceType t);

/// Interior face of the structure graph, rooted at its defining pair.
struct Face {
    FaceType face_type;
    std::pair<int, int> defining_pair;            // 0-based (i, j), i < j
    std::vector<std::pair<int, int>> nested_pairs;  // immediate children, sorted
    std::vector<int> unpaired_lengths;              // meaning depends on type:
                                                    //   HAIRPIN     {loop_len}
                                                    //   STACK       {}
                                                    //   BULGE       {bulge_len}
                                                    //   INTERNAL    {left_len, right_len}
                                                    //   MULTIBRANCH {total_unpaired}
    double energy = 0.0;
    std::string label_key;  // Table-style key, see face_label_key()

    int branches() const { return static_cast<int>(nested_pairs.size()); }
};

/// Labeled secondary-structure graph: path edges between consecutive
/// positions plus one pair edge per match. Outerplanar by construction.
struct StructureGraph {
    Sequence seq;
    SecondaryStructure structure;

    int node_count() const { return seq.length(); }
    int path_edge_count() const { return seq.length() > 0 ? seq.length() - 1 : 0; }
    int pair_edge_count() const { return structure.pair_count(); }
};

/// Vectorized Motzkin path: running partial sums of +1/0/-1 steps.
struct MotzkinVector {
    std::vector<int> y_values;
};

/// Canonical form of a rooted, edge-labeled neighborhood; equal strings
/// iff the rooted neighborhoods are label-preserving isomorphic.
struct NeighborhoodKey {
    std::string canonical_form;

    bool operator==(const NeighborhoodKey& o) const { return canonical_form == o.canonical_form; }
    bool operator<(const NeighborhoodKey& o) const { return canonical_form < o.canonical_form; }
};

/// Throws ValidationError if lengths mismatch.
StructureGraph build_graph(const Sequence& seq, const SecondaryStructure& structure);

/// Classifies one interior region from its child pairs and flanking gaps.
FaceType classify_face(const std::pair<int, int>& defining_pair,
                       const std::vector<std::pair<int, int>>& nested_pairs);

/// One face per pair edge, with energies from face_energy(). The
/// exterior face is not represented.
std::vector<Face> extract_faces(const StructureGraph& graph, const EnergyParameters& params);

/// Face key in the "TYPE[:lengths][:closing/inner]" style, e.g.
/// "INTERNAL:9+8:AT/TA" or "MULTI:3+2".
std::string face_label_key(const Face& face, const Sequence& seq);

/// Fingerprint key for a face: type and lengths plus the face energy
/// rounded to 0.1 kcal/mol, e.g. "HAIRPIN:3@3.0".
std::string face_energy_key(const Face& face);

MotzkinVector motzkin_path(const SecondaryStructure& structure);

/// Canonical key of the closed radius-r ball around center. Edge labels
/// and the root are kept; nucleotide labels are dropped.
NeighborhoodKey rooted_neighborhood_key(const StructureGraph& graph, int center, int radius);

}  // namespace boltzfold

#endif
