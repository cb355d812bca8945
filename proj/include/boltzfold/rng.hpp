#ifndef BOLTZFOLD_RNG_HPP
#define BOLTZFOLD_RNG_HPP

#include <cstdint>
#include <string>

namespace boltzfold {

// Counter-based 64-bit generator (splitmix64 over seed-derived stream).
// Stateless apart from the counter, so identical seeds give identical
// streams on every platform regardless of how many values are consumed
// between checkpoints.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (++counter_);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller on explicit uniforms (distribution
    // objects in <random> are not bit-stable across standard libraries).
    double next_gaussian();

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

// Derives a per-stage seed from a master seed and a stage name (FNV-1a mix).
std::uint64_t derive_seed(std::uint64_t master, const std::string& stage);

}  // namespace boltzfold

#endif
