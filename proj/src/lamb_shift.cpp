#include "dsc/lamb_shift.hpp"

#include "dsc/errors.hpp"
#include "dsc/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

namespace dsc::lamb {

namespace {

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw ValidationError(std::string(name) + " must be finite and > 0");
    }
}

void require_nonnegative(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(std::string(name) + " must be finite and >= 0");
    }
}

double odd_term(double n, double n_cutoff) {
    const double r = n / n_cutoff;
    return 1.0 / (n * (1.0 + r * r));
}

}  // namespace

WarningSink default_warning_sink() {
    return [](std::string_view msg) { std::clog << "warning: " << msg << '\n'; };
}

double single_mode_renorm(double delta0, double g, double omega, const WarningSink& warn) {
    require_nonnegative(delta0, "delta0");
    require_nonnegative(g, "g");
    require_positive(omega, "omega");
    if (warn && delta0 / omega > kAdiabaticWarnRatio) {
        std::ostringstream msg;
        msg << "delta0/omega = " << delta0 / omega
            << " is outside the adiabatic regime (delta0 << omega)";
        warn(msg.str());
    }
    return delta0 * std::exp(-2.0 * g * g / (omega * omega));
}

double multimode_renorm(double delta0, std::span<const ModeCoupling> modes) {
    require_nonnegative(delta0, "delta0");
    std::vector<double> exponents;
    exponents.reserve(modes.size());
    for (const ModeCoupling& m : modes) {
        require_positive(m.omega, "omega_n");
        exponents.push_back(m.g * m.g / (m.omega * m.omega));
    }
    std::sort(exponents.begin(), exponents.end());
    double sum = 0.0;
    for (double e : exponents) sum += e;
    return delta0 * std::exp(-2.0 * sum);
}

double partial_renorm(double delta0, std::span<const ModeCoupling> modes) {
    if (modes.empty()) return multimode_renorm(delta0, modes);
    return multimode_renorm(delta0, modes.subspan(1));
}

std::vector<ModeCoupling> odd_harmonic_modes(double g1, double omega1, double n_cutoff,
                                             std::size_t count) {
    require_nonnegative(g1, "g1");
    require_positive(omega1, "omega1");
    if (!(n_cutoff > 0.0)) throw ValidationError("n_cutoff must be > 0");
    const double wc = n_cutoff * omega1;
    std::vector<ModeCoupling> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double w = static_cast<double>(2 * k + 1) * omega1;
        out.push_back({g1 * resonator::coupling_ratio(w, omega1, wc), w});
    }
    return out;
}

SeriesResult cutoff_series(double n_cutoff, double rel_tol) {
    if (!(n_cutoff > 0.0) || !std::isfinite(n_cutoff)) {
        throw ValidationError("n_cutoff must be finite and > 0");
    }
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be > 0");

    // Odd N with n_c^2 / (4 N^2) < rel_tol * first_term.
    const double first = odd_term(1.0, n_cutoff);
    auto n_last = static_cast<long long>(std::ceil(n_cutoff / (2.0 * std::sqrt(rel_tol * first))));
    if (n_last < 1) n_last = 1;
    if (n_last % 2 == 0) ++n_last;

    // Smallest terms first.
    double sum = 0.0;
    for (long long n = n_last; n >= 1; n -= 2) {
        sum += odd_term(static_cast<double>(n), n_cutoff);
    }
    const double edge = static_cast<double>(n_last + 1);
    sum += 0.25 * std::log1p((n_cutoff / edge) * (n_cutoff / edge));
    return {sum, (n_last + 1) / 2};
}

double cutoff_sum(double n_cutoff, double rel_tol) {
    return cutoff_series(n_cutoff, rel_tol).value;
}

double asymptotic_sum(double n_cutoff) {
    require_positive(n_cutoff, "n_cutoff");
    return 0.25 * (2.0 * kEulerGamma + std::log(4.0)) + 0.5 * std::log(n_cutoff);
}

double uncut_partial_sum(long long terms) {
    double sum = 0.0;
    for (long long k = terms - 1; k >= 0; --k) sum += 1.0 / static_cast<double>(2 * k + 1);
    return sum;
}

std::vector<double> per_mode_shifts(double g1, double omega1, double n_cutoff, int n_modes) {
    if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
    const auto modes = odd_harmonic_modes(g1, omega1, n_cutoff, static_cast<std::size_t>(n_modes));
    std::vector<double> out;
    out.reserve(modes.size());
    for (const ModeCoupling& m : modes) {
        out.push_back(-std::expm1(-2.0 * m.g * m.g / (m.omega * m.omega)));
    }
    return out;
}

namespace {

LambShiftReport report_skeleton(double g1, double omega1, double n_cutoff, int n_modes) {
    require_nonnegative(g1, "g1");
    require_positive(omega1, "omega1");
    require_positive(n_cutoff, "n_cutoff");

    LambShiftReport r;
    r.g1 = g1;
    r.omega1 = omega1;
    r.n_cutoff = n_cutoff;
    r.sum_value = cutoff_sum(n_cutoff);
    if (g1 > 0.0 && r.sum_value < 1.0) {
        throw ValidationError("n_cutoff " + std::to_string(n_cutoff) +
                              " gives a cutoff series below 1; the fundamental alone would "
                              "out-shift all modes together");
    }
    const double x = 2.0 * (g1 / omega1) * (g1 / omega1);
    r.total_shift = -std::expm1(-x * r.sum_value);
    r.fundamental_shift = -std::expm1(-x);
    r.per_mode_shift = per_mode_shifts(g1, omega1, n_cutoff, n_modes);
    return r;
}

}  // namespace

LambShiftReport full_report(double g1, double omega1, double n_cutoff, double delta_measured,
                            int n_modes) {
    require_positive(delta_measured, "delta_measured");
    LambShiftReport r = report_skeleton(g1, omega1, n_cutoff, n_modes);
    const double x = 2.0 * (g1 / omega1) * (g1 / omega1);
    r.delta = delta_measured;
    r.delta0_prime = delta_measured * std::exp(x);
    r.delta0 = delta_measured * std::exp(x * r.sum_value);
    return r;
}

LambShiftReport forward_report(double g1, double omega1, double n_cutoff, double delta0,
                               int n_modes) {
    require_positive(delta0, "delta0");
    LambShiftReport r = report_skeleton(g1, omega1, n_cutoff, n_modes);
    const double x = 2.0 * (g1 / omega1) * (g1 / omega1);
    r.delta0 = delta0;
    r.delta = delta0 * std::exp(-x * r.sum_value);
    r.delta0_prime = r.delta * std::exp(x);
    return r;
}

double report_consistency_error(const LambShiftReport& r) {
    const double x = 2.0 * (r.g1 / r.omega1) * (r.g1 / r.omega1);
    auto rel = [](double a, double b) {
        return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b);
    };
    double err = 0.0;
    err = std::max(err, rel(r.delta0_prime * std::exp(-x), r.delta));
    err = std::max(err, rel(r.delta0 * std::exp(-x * r.sum_value), r.delta));
    err = std::max(err, std::abs((r.delta0 - r.delta) / r.delta0 - r.total_shift));
    err = std::max(err, std::abs((r.delta0_prime - r.delta) / r.delta0_prime - r.fundamental_shift));
    const bool ordered = r.delta > 0.0 && r.delta <= r.delta0_prime * (1.0 + 1e-12) &&
                         r.delta0_prime <= r.delta0 * (1.0 + 1e-12);
    return ordered ? err : std::max(err, 1.0);
}

}  // namespace dsc::lamb
