#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dsc::test {

// Fitted device point used across suites.
inline constexpr double kDelta = 0.147;
inline constexpr double kOmega = 2.57;
inline constexpr double kG = 2.39;

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng_); }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace dsc::test
