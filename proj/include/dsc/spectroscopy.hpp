// spectroscopy.hpp: flux-bias sweeps of the Rabi spectrum.

#pragma once

#include "dsc/rabi.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dsc::spectro {

struct SweepConfig {
    std::vector<double> epsilon_grid;  // GHz
    double freq_min{2.0};              // GHz
    double freq_max{8.0};              // GHz
    int k_levels{6};
    double amplitude_floor{1e-6};
    double truncation_tol{1e-9};       // GHz, per-point convergence of the lowest k_levels

    void validate() const;
};

// `steps` evenly spaced points on [lo, hi], endpoints included.
std::vector<double> linear_grid(double lo, double hi, int steps);

struct SpectralLine {
    double epsilon{0.0};
    std::size_t i{0};
    std::size_t j{0};
    double frequency{0.0};
    double amplitude{0.0};
    std::string label;

    bool allowed(double floor) const { return amplitude >= floor; }
};

// "03" for single-digit indices, "1-12" otherwise.
std::string transition_label(std::size_t i, std::size_t j);
std::pair<std::size_t, std::size_t> parse_label(const std::string& label);

// Lines from states 0 and 1 to every higher state below k_levels whose
// frequency falls in the window, ordered by (epsilon, i, j). States are
// labeled by energy order at each bias. The epsilon field of `base` is ignored.
std::vector<SpectralLine> sweep(const rabi::QrmParams& base, const SweepConfig& cfg);

// The sweep at a single bias.
std::vector<SpectralLine> lines_at(const rabi::QrmParams& base, double epsilon,
                                   const SweepConfig& cfg);

struct IndirectDelta {
    double via_03_13{0.0};
    double via_02_12{0.0};
    double value{0.0};  // mean of the two
};

// w01 from w03 - w13 and w02 - w12 at one bias. Throws ValidationError when a
// line is missing or the biases differ, NumericalError when the two routes
// differ by more than `agreement`.
IndirectDelta indirect_delta(const std::vector<SpectralLine>& lines, double agreement = 1e-9);

// Indirect w01 at several small biases, fitted as w01^2 = a + b eps^2 and
// evaluated at eps = 0.
double extrapolated_delta(const std::vector<SpectralLine>& lines, double agreement = 1e-9);

}  // namespace dsc::spectro
