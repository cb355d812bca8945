#ifndef BOLTZFOLD_FOLDING_HPP
#define BOLTZFOLD_FOLDING_HPP

#include <cstdint>
#include <vector>

#include "boltzfold/energy_model.hpp"
#include "boltzfold/sequence.hpp"

namespace boltzfold {

inline constexpr int kDefaultExhaustiveLimit = 30;

enum class EnsembleMode { Exhaustive, Sampled };

struct EnsembleEntry {
    SecondaryStructure structure;
    double energy = 0.0;       // kcal/mol
    double probability = 0.0;  // exact (exhaustive) or empirical (sampled)
};

/// Boltzmann ensemble of one sequence, exhaustive or sampled.
struct EnsembleDistribution {
    std::vector<EnsembleEntry> entries;
    double partition_value = 1.0;        // Z, dimensionless
    double ensemble_free_energy = 0.0;   // G = -kB T ln Z
    EnsembleMode mode = EnsembleMode::Exhaustive;
    int sample_count = 0;
    std::uint64_t seed = 0;
};

struct PairProbabilityMatrix {
    int n = 0;
    std::vector<double> p_pair;      // row-major n*n, upper triangle filled
    std::vector<double> p_unpaired;  // per position

    double pair(int i, int j) const { return i < j ? p_pair[i * n + j] : p_pair[j * n + i]; }
    double& pair_ref(int i, int j) { return i < j ? p_pair[i * n + j] : p_pair[j * n + i]; }
};

/// Total additive face energy of a structure (sum over extract_faces).
double structure_energy(const Sequence& seq, const SecondaryStructure& structure,
                        const EnergyParameters& params);

/// MFE fold. Among equal-energy optima returns the structure with the
/// lexicographically smallest sorted pair list.
std::pair<SecondaryStructure, double> fold_mfe(const Sequence& seq,
                                               const EnergyParameters& params);

/// Brute-force enumeration of every admissible structure with its energy.
/// Refuses sequences longer than limit.
std::vector<std::pair<SecondaryStructure, double>> enumerate_structures(
    const Sequence& seq, const EnergyParameters& params,
    int limit = kDefaultExhaustiveLimit);

/// McCaskill-style partition function, computed in log space.
/// Returns (Z, G) with G = -kB T ln Z.
std::pair<double, double> partition_function(const Sequence& seq,
                                             const EnergyParameters& params,
                                             const Thermo& thermo);

PairProbabilityMatrix base_pair_probabilities(const Sequence& seq,
                                              const EnergyParameters& params,
                                              const Thermo& thermo);

/// Exhaustive ensemble with exact Boltzmann probabilities; refuses
/// sequences longer than limit.
EnsembleDistribution exhaustive_ensemble(const Sequence& seq, const EnergyParameters& params,
                                         const Thermo& thermo,
                                         int limit = kDefaultExhaustiveLimit);

/// Sampled ensemble via stochastic traceback of the partition-function
/// DP; probabilities are empirical frequencies. Deterministic by seed.
EnsembleDistribution sampled_ensemble(const Sequence& seq, const EnergyParameters& params,
                                      const Thermo& thermo, int n_samples, std::uint64_t seed);

/// Exhaustive when the sequence fits under limit, else sampled.
EnsembleDistribution boltzmann_ensemble(const Sequence& seq, const EnergyParameters& params,
                                        const Thermo& thermo, int n_samples, std::uint64_t seed,
                                        int limit = kDefaultExhaustiveLimit);

}  // namespace boltzfold

#endif
