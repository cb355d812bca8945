#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "boltzfold/rng.hpp"

using namespace boltzfold;

TEST_CASE("identical seeds give identical streams") {
    CounterRng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
    CounterRng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("uniforms stay in [0, 1) and fill the interval") {
    CounterRng r(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double u = r.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("gaussians have roughly standard moments") {
    CounterRng r(11);
    double sum = 0, sum2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double g = r.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("derive_seed separates stages deterministically") {
    CHECK(derive_seed(5, "fold") == derive_seed(5, "fold"));
    CHECK(derive_seed(5, "fold") != derive_seed(5, "sample"));
    CHECK(derive_seed(5, "fold") != derive_seed(6, "fold"));
}
