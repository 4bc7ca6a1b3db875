#pragma once

// Small deterministic generators shared by the property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "efwe/distributions.hpp"

namespace testing_support {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    efwe::EfweParams params() {
        return {log_uniform(0.2, 2.0), log_uniform(0.2, 2.0), log_uniform(0.02, 1.5)};
    }
    /// A point in the bulk of the law: its quantile at a level in (defect, 1).
    double bulk_point(const efwe::EfweParams& p) {
        const double d = efwe::defect(p);
        return efwe::quantile(p, uniform(d + 0.02 * (1.0 - d), 1.0 - 0.02 * (1.0 - d)));
    }
    std::uint64_t seed() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testing_support
