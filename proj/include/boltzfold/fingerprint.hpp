#ifndef BOLTZFOLD_FINGERPRINT_HPP
#define BOLTZFOLD_FINGERPRINT_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "boltzfold/folding.hpp"
#include "boltzfold/structure_graph.hpp"

namespace boltzfold {

enum class FeatureKind { FACE, NEIGHBORHOOD, KMER };

const char* feature_kind_name(FeatureKind k);

/// Ordered feature-key dictionary defining a column space.
struct FeatureDictionary {
    FeatureKind kind = FeatureKind::FACE;
    std::vector<std::string> entries;          // sorted, unique
    std::map<std::string, int> index;          // key -> column

    int size() const { return static_cast<int>(entries.size()); }
    void rebuild_index();
    // -1 when the key is not in the dictionary.
    int column(const std::string& key) const;
};

/// Sparse nonnegative count (or expected-count) vector over a dictionary.
struct Fingerprint {
    const FeatureDictionary* dictionary = nullptr;
    std::map<int, double> values;  // column -> value, all >= 0
    // Features seen but absent from the dictionary (dropped).
    long dropped_features = 0;

    void add(int column, double v) { values[column] += v; }
    double sum() const;
    std::vector<double> dense() const;
};

/// Dense corpus matrix with named column segments.
struct FeatureMatrix {
    struct Segment {
        std::string name;   // "FACE", "NBH", "KMER"
        int begin = 0;      // column span [begin, end)
        int end = 0;
    };

    std::vector<std::string> row_ids;
    std::vector<std::string> column_keys;  // segment-prefixed, e.g. "KMER:ACGT"
    std::vector<Segment> segments;
    std::vector<double> data;  // row-major

    int rows() const { return static_cast<int>(row_ids.size()); }
    int cols() const { return static_cast<int>(column_keys.size()); }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols() + c]; }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols() + c]; }
};

Fingerprint bag_of_faces(const StructureGraph& graph, const EnergyParameters& params,
                         const FeatureDictionary& dict);

Fingerprint bag_of_neighborhoods(const StructureGraph& graph, int radius,
                                 const FeatureDictionary& dict);

/// Counts over all 4^k k-mers in lexicographic order.
Fingerprint kmer_counts(const Sequence& seq, int k, const FeatureDictionary& dict);

/// The fixed 4^k k-mer dictionary (corpus-independent).
FeatureDictionary kmer_dictionary(int k);

/// Per-structure face fingerprinting weighted by ensemble probabilities.
Fingerprint expected_bag_of_faces(const Sequence& seq, const EnsembleDistribution& ensemble,
                                  const EnergyParameters& params, const FeatureDictionary& dict);

Fingerprint expected_bag_of_neighborhoods(const Sequence& seq,
                                          const EnsembleDistribution& ensemble, int radius,
                                          const FeatureDictionary& dict);

/// Union of all feature keys observed across all ensemble structures,
/// sorted lexicographically. For KMER kind returns kmer_dictionary().
FeatureDictionary build_dictionary(
    const std::vector<std::pair<Sequence, const EnsembleDistribution*>>& corpus,
    FeatureKind kind, const EnergyParameters& params, int radius_or_k);

/// One named segment of the assembled matrix.
struct MatrixSegmentSpec {
    std::string name;
    const FeatureDictionary* dict = nullptr;
    // Per-row fingerprints in corpus order, already computed.
    std::vector<Fingerprint> rows;
};

/// Horizontal concatenation of segments; throws on row-count mismatch
/// or empty corpus.
FeatureMatrix assemble_matrix(const std::vector<std::string>& row_ids,
                              const std::vector<MatrixSegmentSpec>& segments);

/// Indices of rows within Euclidean distance epsilon of the query row.
std::vector<int> epsilon_neighborhood(const std::vector<std::vector<double>>& dataset,
                                      int query_row, double epsilon);

std::vector<int> epsilon_neighborhood(const FeatureMatrix& dataset, int query_row,
                                      double epsilon);

std::vector<int> epsilon_neighborhood(const std::vector<MotzkinVector>& dataset, int query_row,
                                      double epsilon);

}  // namespace boltzfold

#endif
