#ifndef BOLTZFOLD_ENERGY_MODEL_HPP
#define BOLTZFOLD_ENERGY_MODEL_HPP

#include <map>
#include <set>
#include <string>
#include <utility>

namespace boltzfold {

struct Face;
struct Sequence;

/// Additive face-energy parameterization shared by folding and
/// fingerprinting. Loop penalties are affine in loop length; the
/// multibranch term is the usual a + b*branches + c*unpaired model.
/// Immutable after construction, safe to share across threads.
struct EnergyParameters {
    // Keyed "XY/ZW": closing pair nucleotides then inner pair nucleotides,
    // both read (i, j) with i < j.
    std::map<std::string, double> stack_table;

    double hairpin_base = 0.0;
    double hairpin_per_nt = 0.0;
    double bulge_base = 0.0;
    double bulge_per_nt = 0.0;
    double internal_base = 0.0;
    double internal_per_nt = 0.0;
    double multibranch_offset_a = 0.0;
    double multibranch_per_branch_b = 0.0;
    double multibranch_per_unpaired_c = 0.0;

    int min_hairpin_unpaired = 3;

    // Unordered; stored with the nucleotides sorted.
    std::set<std::pair<char, char>> allowed_pairs;

    bool can_pair(char a, char b) const {
        return allowed_pairs.count(a <= b ? std::make_pair(a, b) : std::make_pair(b, a)) > 0;
    }

    // Throws ValidationError on any violated invariant.
    void validate() const;
};

/// Temperature and Boltzmann constant; beta derived.
struct Thermo {
    double temperature_kelvin = 310.15;
    double boltzmann_constant = 1.98e-3;  // kcal / (mol K)

    double beta() const { return 1.0 / (boltzmann_constant * temperature_kelvin); }
    void validate() const;
};

/// Embedded default parameter set. Pairs {A·T, C·G, G·T}; stacks -2.0
/// (-1.0 when either pair is G·T); affine loop penalties; multibranch
/// (3.4, 0.4, 0.0); min hairpin gap 3.
EnergyParameters toy_parameters();

/// Loads the TSV parameter format; entries absent from the file keep
/// their toy_parameters() defaults. A PAIR line replaces the default
/// pair set (first occurrence clears it).
EnergyParameters load_parameters(const std::string& path);

/// Parses parameter records from an already-read buffer (used by
/// load_parameters and the tests).
EnergyParameters parse_parameters(const std::string& text);

/// Energy in kcal/mol of one face against its sequence.
/// Throws ValidationError if a stack key is missing from the table.
double face_energy(const Face& face, const Sequence& seq, const EnergyParameters& params);

}  // namespace boltzfold

#endif
