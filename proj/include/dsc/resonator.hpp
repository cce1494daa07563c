// resonator.hpp: modes of a quarter-wave resonator shorted through the
// qubit's shared edge.
//
// The shorted end sees the coupling inductance L_c in parallel with the large
// junction pair L_2. The boundary conditions reduce to
//
//   kX tan(kX) = X l / L_c2,     L_c2 = L_c L_2 / (L_c + L_2)
//
// whose n-th root lies in ((n-1) pi, (n-1) pi + pi/2). The coupling cutoff is
// the angular frequency Z_0 / L_c2.

#pragma once

#include <cstddef>
#include <vector>

namespace dsc::resonator {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kFluxQuantum = 2.067833848e-15;  // Wb

struct ResonatorModel {
    double z0{50.0};           // characteristic impedance, Ohm
    double l_total{0.0};       // X * l, H
    double omega1_bare{0.0};   // pi / (2 X sqrt(c l)) as ordinary frequency, GHz
    double l_c{0.0};           // coupling junction, H
    double l_2{0.0};           // large-junction pair, H
    double i_q{0.0};           // qubit persistent current, A

    double l_c2() const noexcept { return l_c * l_2 / (l_c + l_2); }
    void validate() const;
};

// Junction metadata that travels with a device description. Nothing here
// feeds a computation.
struct DeviceMeta {
    double alpha{0.0};
    double e_j{0.0};  // GHz
    double phi0{kFluxQuantum};

    void validate() const;
};

enum class Cutoff {
    Exact,         // Z_0 / L_c2
    CouplingOnly,  // Z_0 / L_c, valid for L_c << L_2
    Ideal,         // no cutoff: open quarter-wave modes
};

// Cutoff as an ordinary frequency in GHz (infinity for Cutoff::Ideal).
double cutoff_frequency(const ResonatorModel& m, Cutoff mode = Cutoff::Exact);

// X l / L_c2 (or X l / L_c) on the right of the mode equation; infinity for Ideal.
double mode_equation_ratio(const ResonatorModel& m, Cutoff mode = Cutoff::Exact);

// Root of x tan x = ratio on branch n (1-based), by bisection to 1e-12.
double solve_branch(double ratio, int n);

std::vector<double> mode_wavenumbers(const ResonatorModel& m, int n_modes,
                                     Cutoff mode = Cutoff::Exact);

// (n pi - pi/2)(1 - L_c2 / (X l)): the linearized root for low modes.
double first_order_wavenumber(const ResonatorModel& m, int n, Cutoff mode = Cutoff::Exact);

// omega_n = omega1_bare * kX / (pi/2), GHz.
std::vector<double> mode_frequencies(const ResonatorModel& m, int n_modes,
                                     Cutoff mode = Cutoff::Exact);

// Zero-point current at the shorted end, in A. omega_n in GHz.
//   I = sqrt(hbar w / (X l)) / sqrt(1 + (w / w_cutoff)^2)
double zero_point_current(const ResonatorModel& m, double omega_n, Cutoff mode = Cutoff::Exact);

// sqrt((w_n / w_1) / (1 + (w_n / w_c)^2)); w_c may be infinite.
double coupling_ratio(double omega_n, double omega1, double omega_cutoff);

enum class CouplingPath {
    Ratio,     // g_1 scaled by coupling_ratio
    Absolute,  // L_c I_q I_zpf / hbar
};

std::vector<double> coupling_strengths(const ResonatorModel& m, double g1, double omega1,
                                       const std::vector<double>& modes,
                                       CouplingPath path = CouplingPath::Ratio,
                                       Cutoff mode = Cutoff::Exact);

struct ModeRow {
    int n{0};
    double omega_n{0.0};  // GHz
    double k_x{0.0};
    double i_zpf{0.0};    // A
    double g_n{0.0};      // GHz
};

using ModeTable = std::vector<ModeRow>;

// Mode table; couplings are normalized to (g1, omega1) on the ratio path.
ModeTable mode_table(const ResonatorModel& m, int n_modes, double g1, double omega1,
                     CouplingPath path = CouplingPath::Ratio, Cutoff mode = Cutoff::Exact);

}  // namespace dsc::resonator
