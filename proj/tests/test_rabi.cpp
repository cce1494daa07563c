#include "support.hpp"

#include "dsc/errors.hpp"
#include "dsc/rabi.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace dsc;
using namespace dsc::rabi;
using dsc::test::Draw;

namespace {

// Number of eigenvalues of `a` below x, from the pivot signs of a - x I
// (Sylvester's law of inertia). Elimination in long double, no pivoting.
int count_below(const Eigen::MatrixXd& a, double x) {
    const auto n = a.rows();
    std::vector<long double> m(static_cast<std::size_t>(n * n));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m[static_cast<std::size_t>(r * n + c)] = a(r, c) - (r == c ? x : 0.0);
    int negative = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        long double piv = m[static_cast<std::size_t>(k * n + k)];
        if (piv == 0.0L) piv = 1e-300L;
        if (piv < 0) ++negative;
        for (Eigen::Index r = k + 1; r < n; ++r) {
            const long double f = m[static_cast<std::size_t>(r * n + k)] / piv;
            for (Eigen::Index c = k; c < n; ++c)
                m[static_cast<std::size_t>(r * n + c)] -= f * m[static_cast<std::size_t>(k * n + c)];
        }
    }
    return negative;
}

std::vector<double> bisection_eigenvalues(const Eigen::MatrixXd& a) {
    const double bound = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    std::vector<double> out;
    for (int k = 0; k < a.rows(); ++k) {
        double lo = -bound;
        double hi = bound;
        while (hi - lo > 1e-14) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(a, mid) > k) hi = mid; else lo = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

// Parity as an explicit matrix: sigma_x on the qubit, (-1)^n on the mode.
Eigen::MatrixXd parity_matrix(FockTruncation t) {
    const int dim = t.dimension();
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n <= t.n_max; ++n) {
        const double s = (n % 2 == 0) ? 1.0 : -1.0;
        pi(2 * n, 2 * n + 1) = s;
        pi(2 * n + 1, 2 * n) = s;
    }
    return pi;
}

QrmParams reference(double eps = 0.0) { return {test::kDelta, eps, test::kOmega, test::kG}; }

QrmParams random_params(Draw& d, bool symmetric) {
    QrmParams p;
    p.delta_prime = d.uniform(0.0, 0.6);
    p.omega1 = d.uniform(1.0, 5.0);
    p.g1 = p.omega1 * d.uniform(0.0, 1.2);
    p.epsilon = symmetric ? 0.0 : d.uniform(-2.0, 2.0);
    return p;
}

}  // namespace

TEST_SUITE("rabi") {

TEST_CASE("hamiltonian dimension and exact symmetry") {
    for (int n : {1, 2, 7, 40}) {
        const auto h = build_hamiltonian(reference(0.3), {n});
        CHECK(h.rows() == 2 * (n + 1));
        CHECK(h.cols() == 2 * (n + 1));
        CHECK(h == h.transpose());
    }
}

TEST_CASE("truncation outside [1, max] is rejected") {
    CHECK_THROWS_AS(build_hamiltonian(reference(), {0}), ValidationError);
    CHECK_THROWS_AS(build_hamiltonian(reference(), {kMaxFock + 1}), ValidationError);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(build_hamiltonian({-0.1, 0.0, 2.0, 1.0}, {4}), ValidationError);
    CHECK_THROWS_AS(build_hamiltonian({0.1, 0.0, 0.0, 1.0}, {4}), ValidationError);
    CHECK_THROWS_AS(build_hamiltonian({0.1, 0.0, 2.0, -1.0}, {4}), ValidationError);
    CHECK_THROWS_AS(build_hamiltonian({0.1, NAN, 2.0, 1.0}, {4}), ValidationError);
    CHECK_NOTHROW(build_hamiltonian({0.1, -3.0, 2.0, 0.0}, {4}));
}

TEST_CASE("decoupled qubit plus oscillator") {
    const auto es = solve({0.147, 0.0, 2.57, 0.0}, {1});
    REQUIRE(es.size() == 4);
    const double want[] = {-0.0735, 0.0735, -0.0735 + 2.57, 0.0735 + 2.57};
    for (int k = 0; k < 4; ++k) CHECK(es.values[k] == doctest::Approx(want[k]).epsilon(1e-14));
}

TEST_CASE("two-level matrix") {
    const double d = 0.8;
    Eigen::MatrixXd h(2, 2);
    h << 0.0, -d / 2, -d / 2, 0.0;
    const auto es = eigensystem(h);
    CHECK(es.values[0] == doctest::Approx(-d / 2).epsilon(1e-15));
    CHECK(es.values[1] == doctest::Approx(d / 2).epsilon(1e-15));
}

TEST_CASE("random 6x6 against inertia bisection") {
    Draw d(601);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a(6, 6);
        for (int r = 0; r < 6; ++r)
            for (int c = r; c < 6; ++c) a(r, c) = a(c, r) = d.uniform(-1.0, 1.0);
        const auto es = eigensystem(a);
        const auto oracle = bisection_eigenvalues(a);
        for (int k = 0; k < 6; ++k) CHECK(std::abs(es.values[k] - oracle[static_cast<std::size_t>(k)]) < 1e-8);
    }
}

TEST_CASE("non-symmetric and empty input") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(eigensystem(a), ValidationError);
    CHECK_THROWS_AS(eigensystem(Eigen::MatrixXd()), ValidationError);
}

TEST_CASE("eigensystem contract at the reference point") {
    const FockTruncation t{40};
    const auto h = build_hamiltonian(reference(0.2), t);
    const auto es = eigensystem(h);
    const double norm = h.norm();
    for (Eigen::Index k = 1; k < es.values.size(); ++k) CHECK(es.values[k] >= es.values[k - 1]);
    const Eigen::MatrixXd gram = es.vectors.transpose() * es.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
        const Eigen::VectorXd v = es.vectors.col(k);
        CHECK((h * v - es.values[k] * v).norm() <= 1e-9 * norm);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        CHECK(v[arg] > 0.0);
    }
}

TEST_CASE("gap at the reference point") {
    const auto es = solve(reference(), {40});
    CHECK(transition_frequency(es, 0, 1) == doctest::Approx(0.026).epsilon(1e-3 / 0.026));
}

TEST_CASE("transition index errors") {
    const auto es = solve(reference(), {4});
    CHECK_THROWS_AS(transition_frequency(es, 1, 1), ValidationError);
    CHECK_THROWS_AS(transition_frequency(es, 2, 1), ValidationError);
    CHECK_THROWS_AS(transition_frequency(es, 0, es.size()), ValidationError);
    CHECK_THROWS_AS(drive_matrix_element(es, 0, es.size(), {4}), ValidationError);
    CHECK_THROWS_AS(drive_matrix_element(es, 0, 1, {5}), ValidationError);
}

TEST_CASE("parity labels against the explicit operator") {
    const FockTruncation t{40};
    const auto es = solve(reference(), t);
    const auto pi = parity_matrix(t);
    auto expect = [&](Eigen::Index k) { return es.vectors.col(k).dot(pi * es.vectors.col(k)); };
    CHECK(expect(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(expect(3) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(es.parity[0] == Parity::Even);
    CHECK(es.parity[3] == Parity::Odd);
    for (std::size_t k = 0; k < es.size(); ++k)
        CHECK(parity_sign(es.parity[k]) == doctest::Approx(expect(static_cast<Eigen::Index>(k))).epsilon(1e-8));
}

TEST_CASE("broken symmetry gives mixed labels") {
    const auto es = solve(reference(0.1), {20});
    for (Parity p : es.parity) CHECK(p == Parity::Mixed);
    CHECK(to_string(Parity::Mixed) == "mixed");
    CHECK(to_string(Parity::Even) == "+1");
    CHECK(to_string(Parity::Odd) == "-1");
}

TEST_CASE("labels recomputed from a raw eigensystem") {
    const QrmParams p = reference();
    const FockTruncation t{30};
    const auto raw = eigensystem(build_hamiltonian(p, t));
    const auto labels = parity_labels(raw, p, t);
    CHECK(labels[0] == Parity::Even);
    CHECK(labels[3] == Parity::Odd);
}

TEST_CASE("hamiltonian commutes with parity only at zero bias") {
    const FockTruncation t{12};
    const auto pi = parity_matrix(t);
    const auto h0 = build_hamiltonian(reference(), t);
    CHECK((h0 * pi - pi * h0).cwiseAbs().maxCoeff() == 0.0);
    const auto h1 = build_hamiltonian(reference(0.3), t);
    CHECK((h1 * pi - pi * h1).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("apply_parity matches the operator matrix") {
    const FockTruncation t{9};
    Draw d(11);
    Eigen::VectorXd v(t.dimension());
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = d.uniform(-1, 1);
    CHECK((apply_parity(v) - parity_matrix(t) * v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("drive selection rules at zero bias") {
    const FockTruncation t{40};
    const auto es = solve(reference(), t);
    CHECK(drive_matrix_element(es, 0, 2, t) <= 1e-10);
    CHECK(drive_matrix_element(es, 1, 3, t) <= 1e-10);
    CHECK(drive_matrix_element(es, 0, 3, t) > 1e-3);
    CHECK(drive_matrix_element(es, 1, 2, t) > 1e-3);
}

TEST_CASE("no photon change without coupling") {
    const FockTruncation t{6};
    const auto es = solve({0.3, 0.0, 2.0, 0.0}, t);
    CHECK(drive_matrix_element(es, 0, 1, t) == doctest::Approx(0.0));
    CHECK(drive_matrix_element(es, 0, 2, t) > 0.5);
}

TEST_CASE("drive element is symmetric in its indices") {
    const FockTruncation t{20};
    const auto es = solve(reference(0.4), t);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(drive_matrix_element(es, i, j, t) == doctest::Approx(drive_matrix_element(es, j, i, t)));
}

TEST_CASE("truncation schedule") {
    const auto free = converged_truncation({0.147, 0.0, 2.57, 0.0}, 4, 1e-6);
    CHECK(free.n_max == 8);
    const auto ref = converged_truncation(reference(), 4, 1e-6);
    CHECK(ref.n_max <= 64);
    const auto strong = converged_truncation({0.147, 0.0, 2.57, 3 * 2.57}, 4, 1e-6);
    CHECK(strong.n_max > ref.n_max);

    // Oracle: the lowest four levels really do move by less than tol on doubling.
    const auto a = lowest_eigenvalues(reference(), ref, 4);
    const auto b = lowest_eigenvalues(reference(), {2 * ref.n_max}, 4);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("truncation budget exhausted") {
    CHECK_THROWS_AS(converged_truncation({0.147, 0.0, 2.57, 3 * 2.57}, 4, 1e-6, 16), NumericalError);
    CHECK_THROWS_AS(converged_truncation(reference(), 1, 1e-6), ValidationError);
    CHECK_THROWS_AS(converged_truncation(reference(), 4, 0.0), ValidationError);
}

TEST_CASE("schedule start covers the requested levels") {
    const auto t = converged_truncation({0.1, 0.0, 1.0, 0.0}, 40, 1e-9);
    CHECK(t.dimension() >= 40);
}

// Randomized properties: 100 draws each.

TEST_CASE("property: spectrum is even in epsilon") {
    Draw d(1001);
    for (int k = 0; k < 100; ++k) {
        const QrmParams p = random_params(d, false);
        QrmParams m = p;
        m.epsilon = -p.epsilon;
        const auto a = lowest_eigenvalues(p, {24}, 50);
        const auto b = lowest_eigenvalues(m, {24}, 50);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: displaced-oscillator doublets") {
    Draw d(1002);
    for (int k = 0; k < 100; ++k) {
        const double w = d.uniform(1.0, 5.0);
        const double g = w * d.uniform(0.0, 1.2);
        const QrmParams p{0.0, 0.0, w, g};
        const int levels = 6;
        const auto t = converged_truncation(p, 2 * levels, 1e-10);
        const auto es = solve(p, t);
        for (int m = 0; m < levels; ++m) {
            const double want = m * w - g * g / w;
            const double lo = es.values[2 * m];
            const double hi = es.values[2 * m + 1];
            CHECK(std::abs(lo - want) < 1e-6 * w);
            CHECK(std::abs(hi - lo) < 1e-8 * w);
            // One state of each parity per doublet.
            CHECK(parity_sign(es.parity[static_cast<std::size_t>(2 * m)]) *
                      parity_sign(es.parity[static_cast<std::size_t>(2 * m + 1)]) == -1);
        }
    }
}

TEST_CASE("property: same-parity drive elements vanish") {
    Draw d(1003);
    for (int k = 0; k < 100; ++k) {
        const QrmParams p = random_params(d, true);
        const FockTruncation t{24};
        const auto es = solve(p, t);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = i + 1; j < 6; ++j) {
                const int si = parity_sign(es.parity[i]);
                const int sj = parity_sign(es.parity[j]);
                if (si != 0 && si == sj) CHECK(drive_matrix_element(es, i, j, t) < 1e-10);
            }
        }
    }
}

TEST_CASE("property: ground energy non-increasing in n_max") {
    Draw d(1004);
    for (int k = 0; k < 100; ++k) {
        const QrmParams p = random_params(d, false);
        double prev = lowest_eigenvalues(p, {1}, 1)[0];
        for (int n = 2; n <= 40; n += 3) {
            const double e = lowest_eigenvalues(p, {n}, 1)[0];
            CHECK(e <= prev + 1e-12 * (1.0 + std::abs(prev)));
            prev = e;
        }
    }
}

TEST_CASE("property: weak coupling follows the exponential renormalization") {
    Draw d(1005);
    for (int k = 0; k < 100; ++k) {
        const double w = d.uniform(1.0, 5.0);
        const double g = w * d.uniform(0.0, 0.05);
        const double delta = w * d.uniform(0.001, 0.05);
        const auto es = solve({delta, 0.0, w, g}, {16});
        const double want = delta * std::exp(-2.0 * g * g / (w * w));
        CHECK(test::rel_err(transition_frequency(es, 0, 1), want) < 1e-3);
    }
}

}  // TEST_SUITE
