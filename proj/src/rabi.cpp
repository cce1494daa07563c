#include "dsc/rabi.hpp"

#include "dsc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsc::rabi {

void QrmParams::validate() const {
    if (!std::isfinite(delta_prime) || delta_prime < 0.0) {
        throw ValidationError("delta_prime must be finite and >= 0");
    }
    if (!std::isfinite(epsilon)) {
        throw ValidationError("epsilon must be finite");
    }
    if (!std::isfinite(omega1) || omega1 <= 0.0) {
        throw ValidationError("omega1 must be finite and > 0");
    }
    if (!std::isfinite(g1) || g1 < 0.0) {
        throw ValidationError("g1 must be finite and >= 0");
    }
}

std::string to_string(Parity p) {
    switch (p) {
        case Parity::Even: return "+1";
        case Parity::Odd: return "-1";
        case Parity::Mixed: return "mixed";
    }
    return "mixed";
}

int parity_sign(Parity p) {
    switch (p) {
        case Parity::Even: return 1;
        case Parity::Odd: return -1;
        case Parity::Mixed: return 0;
    }
    return 0;
}

namespace {

void check_truncation(FockTruncation t) {
    if (t.n_max < 1) {
        throw ValidationError("n_max must be >= 1");
    }
    if (t.n_max > kMaxFock) {
        throw ValidationError("n_max " + std::to_string(t.n_max) + " exceeds the maximum " +
                              std::to_string(kMaxFock));
    }
}

// Flip the sign so the largest-magnitude coefficient is positive. Ties go to
// the lowest index, with a relative slack so that rounding can't flip it.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) >= peak * (1.0 - 1e-9)) {
            if (v[k] < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

Eigen::MatrixXd build_hamiltonian(const QrmParams& p, FockTruncation t) {
    check_truncation(t);
    p.validate();

    const int dim = t.dimension();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n <= t.n_max; ++n) {
        const int up = 2 * n;        // sz = +1
        const int down = 2 * n + 1;  // sz = -1
        h(up, up) = -0.5 * p.epsilon + p.omega1 * n;
        h(down, down) = 0.5 * p.epsilon + p.omega1 * n;
        h(up, down) = -0.5 * p.delta_prime;
        h(down, up) = -0.5 * p.delta_prime;
        if (n < t.n_max) {
            const double c = p.g1 * std::sqrt(static_cast<double>(n + 1));
            h(up, up + 2) = c;
            h(up + 2, up) = c;
            h(down, down + 2) = -c;
            h(down + 2, down) = -c;
        }
    }
    return h;
}

EigenSystem eigensystem(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw ValidationError("eigensystem: matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ValidationError("eigensystem: matrix is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensystem: symmetric eigensolver did not converge");
    }

    EigenSystem es;
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
        fix_sign(es.vectors.col(k));
    }
    es.parity.assign(es.size(), Parity::Mixed);
    return es;
}

Eigen::VectorXd apply_parity(const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index n = 0; 2 * n + 1 < v.size(); ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        out[2 * n] = sign * v[2 * n + 1];
        out[2 * n + 1] = sign * v[2 * n];
    }
    return out;
}

EigenSystem resolve_parity(EigenSystem es, const QrmParams& p, FockTruncation t) {
    const std::size_t dim = es.size();
    if (static_cast<int>(dim) != t.dimension()) {
        throw ValidationError("resolve_parity: eigensystem does not match the truncation");
    }
    es.parity.assign(dim, Parity::Mixed);
    if (p.epsilon != 0.0) {
        return es;
    }

    const double spread = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    const double degen_tol = 1e-9 * spread;
    Eigen::MatrixXd h;

    std::size_t begin = 0;
    while (begin < dim) {
        std::size_t end = begin + 1;
        while (end < dim && es.values[end] - es.values[end - 1] < degen_tol) ++end;
        const auto count = static_cast<Eigen::Index>(end - begin);

        if (count > 1) {
            const auto b = static_cast<Eigen::Index>(begin);
            Eigen::MatrixXd block = es.vectors.middleCols(b, count);
            Eigen::MatrixXd pi_block(block.rows(), count);
            for (Eigen::Index c = 0; c < count; ++c) pi_block.col(c) = apply_parity(block.col(c));
            Eigen::MatrixXd restricted = block.transpose() * pi_block;
            restricted = 0.5 * (restricted + restricted.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rot(restricted);
            Eigen::MatrixXd rotated = block * rot.eigenvectors();

            // Order rotated states by Rayleigh quotient so values stay sorted.
            if (h.size() == 0) h = build_hamiltonian(p, t);
            std::vector<std::pair<double, Eigen::Index>> order;
            for (Eigen::Index c = 0; c < count; ++c) {
                order.emplace_back(rotated.col(c).dot(h * rotated.col(c)), c);
            }
            std::stable_sort(order.begin(), order.end());
            for (Eigen::Index c = 0; c < count; ++c) {
                es.values[b + c] = order[static_cast<std::size_t>(c)].first;
                es.vectors.col(b + c) = rotated.col(order[static_cast<std::size_t>(c)].second);
                fix_sign(es.vectors.col(b + c));
            }
        }
        begin = end;
    }

    for (std::size_t k = 0; k < dim; ++k) {
        const Eigen::VectorXd v = es.vectors.col(static_cast<Eigen::Index>(k));
        const double expectation = v.dot(apply_parity(v));
        if (std::abs(expectation - 1.0) <= 1e-8) {
            es.parity[k] = Parity::Even;
        } else if (std::abs(expectation + 1.0) <= 1e-8) {
            es.parity[k] = Parity::Odd;
        }
    }
    return es;
}

std::vector<Parity> parity_labels(const EigenSystem& es, const QrmParams& p, FockTruncation t) {
    return resolve_parity(es, p, t).parity;
}

EigenSystem solve(const QrmParams& p, FockTruncation t) {
    return resolve_parity(eigensystem(build_hamiltonian(p, t)), p, t);
}

Eigen::VectorXd lowest_eigenvalues(const QrmParams& p, FockTruncation t, int count) {
    const Eigen::MatrixXd h = build_hamiltonian(p, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver did not converge");
    }
    const auto n = std::min<Eigen::Index>(count, solver.eigenvalues().size());
    return solver.eigenvalues().head(n);
}

double transition_frequency(const EigenSystem& es, std::size_t i, std::size_t j) {
    if (!(i < j && j < es.size())) {
        throw ValidationError("transition_frequency: need i < j < " + std::to_string(es.size()));
    }
    return es.values[static_cast<Eigen::Index>(j)] - es.values[static_cast<Eigen::Index>(i)];
}

double drive_matrix_element(const EigenSystem& es, std::size_t i, std::size_t j, FockTruncation t) {
    if (i >= es.size() || j >= es.size()) {
        throw ValidationError("drive_matrix_element: state index out of range");
    }
    if (static_cast<int>(es.size()) != t.dimension()) {
        throw ValidationError("drive_matrix_element: eigensystem does not match the truncation");
    }
    const auto vi = es.vectors.col(static_cast<Eigen::Index>(i));
    const auto vj = es.vectors.col(static_cast<Eigen::Index>(j));
    double sum = 0.0;
    for (int n = 0; n < t.n_max; ++n) {
        const double c = std::sqrt(static_cast<double>(n + 1));
        for (int q = 0; q < 2; ++q) {
            const int lo = 2 * n + q;
            const int hi = lo + 2;
            sum += c * (vi[lo] * vj[hi] + vi[hi] * vj[lo]);
        }
    }
    return std::abs(sum);
}

FockTruncation converged_truncation(const QrmParams& p, int k_levels, double tol, int ceiling) {
    if (k_levels < 2) throw ValidationError("converged_truncation: k_levels must be >= 2");
    if (!(tol > 0.0)) throw ValidationError("converged_truncation: tol must be > 0");
    p.validate();

    int n = 8;
    while (2 * (n + 1) < k_levels) n *= 2;
    Eigen::VectorXd current = lowest_eigenvalues(p, {n}, k_levels);
    while (2 * n <= std::min(ceiling, kMaxFock)) {
        Eigen::VectorXd next = lowest_eigenvalues(p, {2 * n}, k_levels);
        if ((next - current).cwiseAbs().maxCoeff() < tol) {
            return {n};
        }
        n *= 2;
        current = std::move(next);
    }
    throw NumericalError("converged_truncation: no convergence below n_max ceiling " +
                         std::to_string(ceiling));
}

}  // namespace dsc::rabi
