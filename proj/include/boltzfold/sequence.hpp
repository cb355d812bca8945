#ifndef BOLTZFOLD_SEQUENCE_HPP
#define BOLTZFOLD_SEQUENCE_HPP

#include <string>
#include <vector>

namespace boltzfold {

struct EnergyParameters;

/// DNA sequence over {A,C,G,T} with an opaque id.
struct Sequence {
    std::string id;
    std::string bases;

    Sequence() = default;
    Sequence(std::string id_, std::string bases_) : id(std::move(id_)), bases(std::move(bases_)) {}

    int length() const { return static_cast<int>(bases.size()); }

    // Throws ValidationError naming the first bad base.
    void validate() const;
};

/// Non-crossing partial matching over sequence positions.
/// pair_table is 0-based internally; UNPAIRED marks free positions.
struct SecondaryStructure {
    static constexpr int UNPAIRED = -1;

    std::vector<int> pair_table;

    SecondaryStructure() = default;
    explicit SecondaryStructure(int n) : pair_table(n, UNPAIRED) {}

    int length() const { return static_cast<int>(pair_table.size()); }
    bool paired(int i) const { return pair_table[i] != UNPAIRED; }
    int partner(int i) const { return pair_table[i]; }

    void add_pair(int i, int j) {
        pair_table[i] = j;
        pair_table[j] = i;
    }

    int pair_count() const;
    std::string dot_bracket() const;
    static SecondaryStructure from_dot_bracket(const std::string& db);

    // Sorted (i,j) pairs with i < j; the tie-break ordering key.
    std::vector<std::pair<int, int>> pairs() const;

    // Symmetry, non-crossing, hairpin gap, pair legality against seq/params.
    // Throws ValidationError on the first violation.
    void validate(const Sequence& seq, const EnergyParameters& params) const;
};

}  // namespace boltzfold

#endif
