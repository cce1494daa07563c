// rabi.hpp: truncated single-mode quantum Rabi Hamiltonian
//
//   H = -1/2 (delta' sx + eps sz) + omega1 a^dag a + g1 sz (a + a^dag)
//
// All energies are ordinary frequencies in GHz. The basis index of
// |n_fock, qubit> is 2*n_fock + qubit, with qubit 0 the +1 eigenstate of sz.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace dsc::rabi {

struct QrmParams {
    double delta_prime{0.0};  // partially renormalized qubit gap
    double epsilon{0.0};      // flux bias, 0 at the symmetry point
    double omega1{1.0};       // fundamental mode frequency
    double g1{0.0};           // qubit-mode coupling

    // Throws ValidationError naming the offending field.
    void validate() const;
};

inline constexpr int kDefaultFock = 40;
inline constexpr int kMaxFock = 4096;

struct FockTruncation {
    int n_max{kDefaultFock};  // photon states 0..n_max inclusive

    int dimension() const noexcept { return 2 * (n_max + 1); }
};

// Eigenvalue of the parity operator sx * (-1)^(a^dag a). Only defined at eps = 0.
enum class Parity { Even, Odd, Mixed };

std::string to_string(Parity p);
int parity_sign(Parity p);  // +1, -1, or 0 for Mixed

struct EigenSystem {
    Eigen::VectorXd values;        // ascending
    Eigen::MatrixXd vectors;       // columns, orthonormal
    std::vector<Parity> parity;    // one label per state

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

Eigen::MatrixXd build_hamiltonian(const QrmParams& p, FockTruncation t);

// Dense symmetric decomposition. Parity labels are left Mixed; use solve()
// or resolve_parity() when the parameters are known.
EigenSystem eigensystem(const Eigen::MatrixXd& h);

// At eps = 0 rotates every degenerate eigenspace onto parity eigenvectors and
// labels each state; at eps != 0 labels everything Mixed.
EigenSystem resolve_parity(EigenSystem es, const QrmParams& p, FockTruncation t);

std::vector<Parity> parity_labels(const EigenSystem& es, const QrmParams& p, FockTruncation t);

// build_hamiltonian + eigensystem + resolve_parity.
EigenSystem solve(const QrmParams& p, FockTruncation t = {});

// Lowest eigenvalues only, for truncation scans.
Eigen::VectorXd lowest_eigenvalues(const QrmParams& p, FockTruncation t, int count);

double transition_frequency(const EigenSystem& es, std::size_t i, std::size_t j);

// |<i|(a + a^dag)|j>|, the resonator-mediated drive amplitude.
double drive_matrix_element(const EigenSystem& es, std::size_t i, std::size_t j, FockTruncation t);

// Applies the parity operator to a state vector in the declared basis.
Eigen::VectorXd apply_parity(const Eigen::VectorXd& v);

// Smallest n_max in the schedule 8, 16, 32, ... such that the lowest
// k_levels eigenvalues change by less than tol when n_max doubles.
// Throws NumericalError when the next doubling would exceed `ceiling`.
FockTruncation converged_truncation(const QrmParams& p, int k_levels, double tol,
                                    int ceiling = kMaxFock);

}  // namespace dsc::rabi
