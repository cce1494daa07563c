// lamb_shift.hpp: adiabatic renormalization of the qubit gap by one or many
// resonator modes, and the odd-harmonic cutoff series.

#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace dsc::lamb {

inline constexpr double kEulerGamma = 0.577215664901533;

// Ratio delta0 / omega above which the exponential formula is flagged.
inline constexpr double kAdiabaticWarnRatio = 0.2;

using WarningSink = std::function<void(std::string_view)>;

// Writes to std::clog.
WarningSink default_warning_sink();

struct ModeCoupling {
    double g{0.0};      // GHz
    double omega{0.0};  // GHz
};

// delta0 * exp(-2 g^2 / omega^2). Warns through `warn` when delta0/omega > 0.2.
double single_mode_renorm(double delta0, double g, double omega,
                          const WarningSink& warn = default_warning_sink());

// delta0 * exp(-2 sum g_n^2 / omega_n^2). Terms are summed in sorted order so
// the result does not depend on the order of `modes`.
double multimode_renorm(double delta0, std::span<const ModeCoupling> modes);

// As multimode_renorm, skipping modes[0] (the fundamental).
double partial_renorm(double delta0, std::span<const ModeCoupling> modes);

// Couplings of the first `count` odd harmonics w_n = (2n-1) w_1 under the
// ratio-form coupling law with w_c = n_cutoff * w_1. n_cutoff may be infinite.
std::vector<ModeCoupling> odd_harmonic_modes(double g1, double omega1, double n_cutoff,
                                             std::size_t count);

struct SeriesResult {
    double value{0.0};
    long long terms{0};  // odd terms summed explicitly before the tail correction
};

// Sum over odd n of 1 / (n (1 + n^2 / n_cutoff^2)).
//
// Explicit terms stop at the first odd N whose tail bound n_cutoff^2 / (4 N^2)
// is below rel_tol times the first term, itself a lower bound on the sum. The
// remainder is replaced by its midpoint-rule integral, 1/4 ln(1 + n_c^2/(N+1)^2).
SeriesResult cutoff_series(double n_cutoff, double rel_tol = 1e-9);
double cutoff_sum(double n_cutoff, double rel_tol = 1e-9);

// 0.25 (2 gamma + ln 4) + 0.5 ln n_cutoff, the large-n_cutoff limit of cutoff_sum.
double asymptotic_sum(double n_cutoff);

// Sum over the first `terms` odd n of 1/n: the series without a cutoff.
double uncut_partial_sum(long long terms);

struct LambShiftReport {
    double delta0{0.0};        // bare gap, GHz
    double delta0_prime{0.0};  // renormalized by every mode but the fundamental
    double delta{0.0};         // fully renormalized
    double sum_value{0.0};
    double n_cutoff{0.0};
    double g1{0.0};
    double omega1{0.0};
    std::vector<double> per_mode_shift;  // (delta0 - delta_n) / delta0
    double total_shift{0.0};             // (delta0 - delta) / delta0
    double fundamental_shift{0.0};       // (delta0' - delta) / delta0'
};

inline constexpr int kDefaultReportModes = 50;

// From the measured gap back to the bare one. Throws ValidationError when
// the series is below 1 for nonzero coupling (the fundamental-only factor
// would exceed the full product).
LambShiftReport full_report(double g1, double omega1, double n_cutoff, double delta_measured,
                            int n_modes = kDefaultReportModes);

// Bare gap in, renormalized gaps out.
LambShiftReport forward_report(double g1, double omega1, double n_cutoff, double delta0,
                               int n_modes = kDefaultReportModes);

// 1 - exp(-2 g_n^2 / w_n^2) per odd harmonic, n = 1..n_modes.
std::vector<double> per_mode_shifts(double g1, double omega1, double n_cutoff, int n_modes);

// Returns the largest relative violation of the report's consistency
// relations; 0 for a perfectly consistent report.
double report_consistency_error(const LambShiftReport& r);

}  // namespace dsc::lamb
