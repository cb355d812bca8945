#include "boltzfold/rng.hpp"

#include <cmath>

namespace boltzfold {

double CounterRng::next_gaussian() {
    // Discard the second Box-Muller variate; determinism matters more
    // than throughput anywhere this is used.
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& stage) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ master;
    for (unsigned char c : stage) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    h ^= master >> 32;
    h *= 0x100000001b3ULL;
    return h;
}

}  // namespace boltzfold
