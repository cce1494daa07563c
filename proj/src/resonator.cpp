#include "dsc/resonator.hpp"

#include "dsc/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dsc::resonator {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw ValidationError(std::string(name) + " must be finite and > 0");
    }
}

double effective_inductance(const ResonatorModel& m, Cutoff mode) {
    return mode == Cutoff::CouplingOnly ? m.l_c : m.l_c2();
}

}  // namespace

void ResonatorModel::validate() const {
    require_positive(z0, "z0");
    require_positive(l_total, "l_total");
    require_positive(omega1_bare, "omega1_bare");
    require_positive(l_c, "l_c");
    require_positive(l_2, "l_2");
    require_positive(i_q, "i_q");
}

void DeviceMeta::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
    require_positive(e_j, "e_j");
    require_positive(phi0, "phi0");
}

double cutoff_frequency(const ResonatorModel& m, Cutoff mode) {
    if (mode == Cutoff::Ideal) return kInf;
    return m.z0 / effective_inductance(m, mode) / (2.0 * kPi) * 1e-9;
}

double mode_equation_ratio(const ResonatorModel& m, Cutoff mode) {
    if (mode == Cutoff::Ideal) return kInf;
    return m.l_total / effective_inductance(m, mode);
}

double solve_branch(double ratio, int n) {
    if (n < 1) throw ValidationError("solve_branch: branch index must be >= 1");
    if (!(ratio > 0.0)) throw ValidationError("solve_branch: ratio must be > 0");

    double lo = (n - 1) * kPi;
    double hi = n * kPi - 0.5 * kPi;
    // Root sits hi/ratio below the pole to leading order; past double
    // resolution the pole itself is the answer.
    if (!std::isfinite(ratio) || hi / ratio < 0.5 * std::numeric_limits<double>::epsilon() * hi) {
        return hi;
    }
    // Run to full resolution: near the pole a 1e-12 bracket still leaves a
    // residual of order 1e-12 * ratio / x.
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (mid * std::tan(mid) < ratio) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> mode_wavenumbers(const ResonatorModel& m, int n_modes, Cutoff mode) {
    if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
    m.validate();
    const double ratio = mode_equation_ratio(m, mode);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n) out.push_back(solve_branch(ratio, n));
    return out;
}

double first_order_wavenumber(const ResonatorModel& m, int n, Cutoff mode) {
    const double ratio = mode_equation_ratio(m, mode);
    return (n * kPi - 0.5 * kPi) * (1.0 - 1.0 / ratio);
}

std::vector<double> mode_frequencies(const ResonatorModel& m, int n_modes, Cutoff mode) {
    std::vector<double> out = mode_wavenumbers(m, n_modes, mode);
    for (double& kx : out) kx = m.omega1_bare * kx / (0.5 * kPi);
    return out;
}

double zero_point_current(const ResonatorModel& m, double omega_n, Cutoff mode) {
    require_positive(omega_n, "omega_n");
    const double w = 2.0 * kPi * omega_n * 1e9;
    const double roll = omega_n / cutoff_frequency(m, mode);
    return std::sqrt(kHbar * w / m.l_total) / std::sqrt(1.0 + roll * roll);
}

double coupling_ratio(double omega_n, double omega1, double omega_cutoff) {
    const double roll = omega_n / omega_cutoff;
    return std::sqrt((omega_n / omega1) / (1.0 + roll * roll));
}

std::vector<double> coupling_strengths(const ResonatorModel& m, double g1, double omega1,
                                       const std::vector<double>& modes, CouplingPath path,
                                       Cutoff mode) {
    require_positive(omega1, "omega1");
    if (!std::isfinite(g1) || g1 < 0.0) throw ValidationError("g1 must be finite and >= 0");

    std::vector<double> out;
    out.reserve(modes.size());
    if (path == CouplingPath::Ratio) {
        const double wc = cutoff_frequency(m, mode);
        for (double w : modes) {
            require_positive(w, "omega_n");
            out.push_back(g1 * coupling_ratio(w, omega1, wc));
        }
    } else {
        m.validate();
        for (double w : modes) {
            const double g_angular = m.l_c * m.i_q * zero_point_current(m, w, mode) / kHbar;
            out.push_back(g_angular / (2.0 * kPi) * 1e-9);
        }
    }
    return out;
}

ModeTable mode_table(const ResonatorModel& m, int n_modes, double g1, double omega1,
                     CouplingPath path, Cutoff mode) {
    const std::vector<double> kx = mode_wavenumbers(m, n_modes, mode);
    const std::vector<double> freqs = mode_frequencies(m, n_modes, mode);
    const std::vector<double> g = coupling_strengths(m, g1, omega1, freqs, path, mode);

    ModeTable table;
    table.reserve(freqs.size());
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        table.push_back({static_cast<int>(k) + 1, freqs[k], kx[k],
                         zero_point_current(m, freqs[k], mode), g[k]});
    }
    return table;
}

}  // namespace dsc::resonator
