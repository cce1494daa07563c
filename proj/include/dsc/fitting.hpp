// fitting.hpp: least-squares recovery of (delta', omega1, g1) from measured
// spectral peaks with a bounded Nelder-Mead simplex.

#pragma once

#include "dsc/lamb_shift.hpp"
#include "dsc/rabi.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsc::fit {

struct PeakRow {
    double epsilon{0.0};    // GHz
    double frequency{0.0};  // GHz
    std::optional<std::string> label;
    double weight{1.0};
};

struct PeakData {
    std::vector<PeakRow> rows;

    // At least 3 finite rows with positive weights and valid labels, spanning
    // more than one bias value.
    void validate() const;
};

// The single-mode parameters a fit adjusts. Bias comes from the data.
struct FitParams {
    double delta_prime{0.0};
    double omega1{1.0};
    double g1{0.0};

    rabi::QrmParams at(double epsilon) const { return {delta_prime, epsilon, omega1, g1}; }
    std::array<double, 3> as_array() const { return {delta_prime, omega1, g1}; }
    static FitParams from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
};

enum class Param { DeltaPrime = 0, Omega1 = 1, G1 = 2 };

struct Bounds {
    std::array<std::pair<double, double>, 3> range{
        {{0.0, 2.0}, {0.1, 20.0}, {0.0, 20.0}}};

    bool contains(const FitParams& p) const;
    void validate() const;
};

struct FitOptions {
    int n_max{rabi::kDefaultFock};  // truncation inside the objective
    int max_iterations{4000};       // per simplex run
    double diameter_tol{1e-6};      // GHz, every parameter
    double improvement_tol{1e-12};  // objective units, over a full cycle
    double initial_step{0.05};      // relative simplex edge
    int nearest_levels{6};          // states searched by nearest-line assignment
    double amplitude_floor{1e-6};   // lines weaker than this are not candidates
    double verify_tol{1e-9};        // GHz, truncation check of the final point
};

// Labeled mode: the named transition. Nearest mode (label empty): the allowed
// transition from state 0 or 1 that lies closest to `measured`.
double model_frequency(const FitParams& params, double epsilon,
                       const std::optional<std::string>& label, double measured = 0.0,
                       const FitOptions& opts = {});

struct FitResult {
    FitParams params;
    double objective{0.0};  // sum w r^2 / sum w, GHz^2
    double residual_rms{0.0};
    std::vector<double> per_point_residuals;  // model - measured, input row order
    int iterations{0};
    bool converged{false};
    int verified_n_max{0};
    std::vector<double> trace;  // best objective after each accepted step
};

// Weighted mean squared mismatch at the given truncation.
double objective(const PeakData& data, const FitParams& params, const FitOptions& opts = {});

FitResult fit(const PeakData& data, const FitParams& initial, const Bounds& bounds,
              const FitOptions& opts = {});

struct Profile {
    Param which{Param::G1};
    std::vector<double> values;
    std::vector<double> objectives;  // others re-optimized at each value
    double rms_rise{0.0};            // worst-edge RMS rise above the optimum, GHz
    bool poorly_constrained{false};
};

// Profile objective along one parameter over best * (1 + offset), re-fitting
// the other two. Flags the parameter when moving it by the largest offset
// raises the RMS residual by less than `flat_rms`.
Profile profile(const PeakData& data, const FitResult& best, Param which,
                const std::vector<double>& rel_offsets, const Bounds& bounds,
                double flat_rms = 1e-3, const FitOptions& opts = {});

// Exact peaks from the model at the given biases and labels, plus optional
// Gaussian noise drawn from a seeded generator.
PeakData synthesize(const FitParams& truth, const std::vector<double>& epsilons,
                    const std::vector<std::string>& labels, double noise_sigma = 0.0,
                    std::uint64_t seed = 0, const FitOptions& opts = {});

// Lamb-shift report from fitted parameters. Without a measured gap the
// single-mode renormalization of the fitted delta' stands in for it.
lamb::LambShiftReport report_chain(const FitResult& result, double n_cutoff,
                                   std::optional<double> measured_delta = std::nullopt);

}  // namespace dsc::fit
