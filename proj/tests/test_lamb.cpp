#include "support.hpp"

#include "dsc/errors.hpp"
#include "dsc/lamb_shift.hpp"
#include "dsc/rabi.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

using namespace dsc;
using namespace dsc::lamb;
using dsc::test::Draw;
using dsc::test::kDelta;
using dsc::test::kG;
using dsc::test::kOmega;

namespace {

const WarningSink kQuiet = [](std::string_view) {};

// Compensated direct sum of the first `terms` odd terms, largest first.
double kahan_series(double nc, long long terms) {
    double sum = 0.0;
    double c = 0.0;
    for (long long k = 0; k < terms; ++k) {
        const double n = static_cast<double>(2 * k + 1);
        const double y = 1.0 / (n * (1.0 + (n / nc) * (n / nc))) - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double ratio_sq(double g, double w) { return (g / w) * (g / w); }

}  // namespace

TEST_SUITE("lamb") {

TEST_CASE("single-mode renormalization") {
    CHECK(single_mode_renorm(kDelta, kG, kOmega, kQuiet) == doctest::Approx(0.0261).epsilon(1e-4 / 0.0261));
    CHECK(single_mode_renorm(0.3, 0.0, 2.0, kQuiet) == 0.3);
}

TEST_CASE("single-mode formula against diagonalization") {
    const double want = single_mode_renorm(0.05, 0.3, 3.0, kQuiet);
    const auto es = rabi::solve({0.05, 0.0, 3.0, 0.3}, {30});
    CHECK(test::rel_err(rabi::transition_frequency(es, 0, 1), want) < 5e-3);
}

TEST_CASE("adiabatic warning is soft") {
    std::vector<std::string> seen;
    const WarningSink sink = [&](std::string_view m) { seen.emplace_back(m); };
    single_mode_renorm(0.1, 1.0, 2.0, sink);
    CHECK(seen.empty());
    const double v = single_mode_renorm(1.0, 1.0, 2.0, sink);
    CHECK(seen.size() == 1);
    CHECK(v == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("renormalization input checks") {
    CHECK_THROWS_AS(single_mode_renorm(-1.0, 1.0, 2.0, kQuiet), ValidationError);
    CHECK_THROWS_AS(single_mode_renorm(1.0, 1.0, 0.0, kQuiet), ValidationError);
    const std::vector<ModeCoupling> bad{{1.0, 0.0}};
    CHECK_THROWS_AS(multimode_renorm(1.0, bad), ValidationError);
}

TEST_CASE("multimode reduces to single mode") {
    const std::vector<ModeCoupling> one{{kG, kOmega}};
    CHECK(multimode_renorm(kDelta, one) == single_mode_renorm(kDelta, kG, kOmega, kQuiet));
    const std::vector<ModeCoupling> two{{0.7, 3.0}, {0.7, 3.0}};
    CHECK(multimode_renorm(0.5, two) ==
          doctest::Approx(single_mode_renorm(0.5, std::sqrt(2.0) * 0.7, 3.0, kQuiet)).epsilon(1e-14));
}

TEST_CASE("multimode product matches the cutoff series") {
    const double nc = 13.2;
    const double g1 = 0.930 * kOmega;
    const auto modes = odd_harmonic_modes(g1, kOmega, nc, 1000000);
    const double direct = multimode_renorm(1.0, modes);
    const double series = std::exp(-2.0 * ratio_sq(g1, kOmega) * cutoff_sum(nc));
    CHECK(test::rel_err(direct, series) < 1e-6);
}

TEST_CASE("partial renormalization") {
    CHECK(partial_renorm(0.7, std::vector<ModeCoupling>{}) == 0.7);
    CHECK(partial_renorm(0.7, std::vector<ModeCoupling>{{kG, kOmega}}) == 0.7);

    const double nc = 13.2;
    const auto modes = odd_harmonic_modes(kG, kOmega, nc, 1000000);
    const double s1 = 1.0 / (1.0 + 1.0 / (nc * nc));
    const double want = std::exp(-2.0 * ratio_sq(kG, kOmega) * (cutoff_sum(nc) - s1));
    CHECK(test::rel_err(partial_renorm(1.0, modes), want) < 1e-6);
}

TEST_CASE("cutoff series value") {
    CHECK(cutoff_sum(13.2) == doctest::Approx(1.93).epsilon(0.01 / 1.93));
    CHECK(asymptotic_sum(13.2) == doctest::Approx(1.925).epsilon(0.001 / 1.925));
    CHECK(0.25 * (2 * kEulerGamma + std::log(4.0)) == doctest::Approx(0.635).epsilon(1e-3));
}

TEST_CASE("cutoff series at small n_cutoff") {
    // n_c^2 * sum over odd n of 1/n^3 = n_c^2 * (7/8) zeta(3)
    const double odd_zeta3 = 0.875 * 1.2020569031595942;
    for (double nc : {1e-3, 1e-2}) {
        CHECK(cutoff_sum(nc) / (nc * nc) == doctest::Approx(odd_zeta3).epsilon(2e-4));
    }
}

TEST_CASE("cutoff series against compensated summation") {
    for (double nc : {1.0, 13.2, 100.0}) {
        const long long terms = 2000000;
        // Remaining tail is below n_c^2 / (16 terms^2) relative.
        const double oracle = kahan_series(nc, terms);
        const double tail_bound = nc * nc / (16.0 * terms * static_cast<double>(terms));
        CHECK(std::abs(cutoff_sum(nc) - oracle) / oracle < 1e-8 + tail_bound);
    }
}

TEST_CASE("frozen series values") {
    CHECK(cutoff_sum(13.2) == doctest::Approx(1.9248096247).epsilon(1e-9));
    CHECK(cutoff_sum(2.0) == doctest::Approx(0.956).epsilon(1e-3));
}

TEST_CASE("asymptote approaches the series") {
    double prev = 1.0;
    for (double nc : {10.0, 30.0, 100.0, 300.0}) {
        const double gap = std::abs(cutoff_sum(nc) - asymptotic_sum(nc));
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("series input checks") {
    CHECK_THROWS_AS(cutoff_sum(0.0), ValidationError);
    CHECK_THROWS_AS(cutoff_sum(std::numeric_limits<double>::infinity()), ValidationError);
    CHECK_THROWS_AS(cutoff_sum(13.2, 0.0), ValidationError);
    CHECK_THROWS_AS(asymptotic_sum(-1.0), ValidationError);
}

TEST_CASE("report from a measured gap") {
    const auto r = full_report(kG, kOmega, 13.2, 0.026);
    CHECK(r.total_shift == doctest::Approx(0.965).epsilon(0.002 / 0.965));
    CHECK(r.delta0 == doctest::Approx(0.732).epsilon(0.010 / 0.732));
    CHECK(r.fundamental_shift == doctest::Approx(1 - std::exp(-2 * ratio_sq(kG, kOmega))).epsilon(1e-14));
    CHECK(r.fundamental_shift == doctest::Approx(0.823).epsilon(0.002 / 0.823));
    CHECK(r.per_mode_shift.size() == static_cast<std::size_t>(kDefaultReportModes));
    CHECK(report_consistency_error(r) < 1e-10);
}

TEST_CASE("report without coupling") {
    const auto r = full_report(0.0, kOmega, 13.2, 0.1);
    CHECK(r.total_shift == 0.0);
    CHECK(r.fundamental_shift == 0.0);
    CHECK(r.delta0 == 0.1);
    CHECK(r.delta0_prime == 0.1);
    for (double s : r.per_mode_shift) CHECK(s == 0.0);
}

TEST_CASE("series below one is rejected") {
    CHECK_THROWS_AS(full_report(kG, kOmega, 2.0, 0.026), ValidationError);
    CHECK_NOTHROW(full_report(kG, kOmega, 2.2, 0.026));
    CHECK_THROWS_AS(full_report(kG, kOmega, 13.2, 0.0), ValidationError);
}

TEST_CASE("forward report inverts the measured one") {
    const auto back = full_report(kG, kOmega, 13.2, 0.026);
    const auto fwd = forward_report(kG, kOmega, 13.2, back.delta0);
    CHECK(fwd.delta == doctest::Approx(0.026).epsilon(1e-12));
    CHECK(fwd.delta0_prime == doctest::Approx(back.delta0_prime).epsilon(1e-12));
    CHECK(report_consistency_error(fwd) < 1e-10);
}

TEST_CASE("per-mode shifts") {
    const auto s = per_mode_shifts(kG, kOmega, 13.2, 20);
    CHECK(s[0] == doctest::Approx(0.82).epsilon(0.01 / 0.82));
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] < s[k - 1]);
    CHECK_THROWS_AS(per_mode_shifts(kG, kOmega, 13.2, 0), ValidationError);
}

TEST_CASE("no cutoff: exponent 2(g/w)^2/n and full suppression") {
    const double inf = std::numeric_limits<double>::infinity();
    const auto modes = odd_harmonic_modes(kG, kOmega, inf, 5);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const double n = static_cast<double>(2 * k + 1);
        CHECK(ratio_sq(modes[k].g, modes[k].omega) == doctest::Approx(ratio_sq(kG, kOmega) / n).epsilon(1e-14));
    }
    double prev = 1.0;
    for (std::size_t count : {10u, 1000u, 100000u, 1000000u}) {
        const double left = multimode_renorm(1.0, odd_harmonic_modes(kG, kOmega, inf, count));
        CHECK(left < prev);
        prev = left;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("property: uncut partial sums are unbounded") {
    double prev = 0.0;
    for (long long n = 10; n <= 10000000; n *= 10) {
        const double s = uncut_partial_sum(n);
        CHECK(s > prev + 1.0);
        CHECK(s > 0.5 * std::log(2.0 * n));
        prev = s;
    }
}

TEST_CASE("property: gap survives any finite cutoff") {
    Draw d(301);
    for (int k = 0; k < 100; ++k) {
        const double w = d.uniform(1.0, 5.0);
        const double g = w * d.uniform(0.0, 1.5);
        const double nc = std::pow(10.0, d.uniform(0.4, 3.0));
        const auto r = forward_report(g, w, nc, d.uniform(0.1, 2.0), 10);
        CHECK(r.delta > 0.0);
        CHECK(r.total_shift < 1.0);
        CHECK(r.total_shift >= 0.0);
        CHECK(r.fundamental_shift < 1.0);
        CHECK(report_consistency_error(r) < 1e-10);
        const auto m = full_report(g, w, nc, r.delta, 10);
        CHECK(report_consistency_error(m) < 1e-10);
    }
}

TEST_CASE("property: total shift increases with coupling and cutoff") {
    Draw d(302);
    for (int k = 0; k < 100; ++k) {
        const double w = d.uniform(1.0, 5.0);
        const double ga = w * d.uniform(0.01, 1.5);
        const double gb = ga * d.uniform(1.01, 1.5);
        const double na = std::pow(10.0, d.uniform(0.4, 2.5));
        const double nb = na * d.uniform(1.05, 3.0);
        const double delta0 = 0.5;
        CHECK(forward_report(gb, w, na, delta0, 1).total_shift > forward_report(ga, w, na, delta0, 1).total_shift);
        CHECK(forward_report(ga, w, nb, delta0, 1).total_shift > forward_report(ga, w, na, delta0, 1).total_shift);
    }
}

TEST_CASE("property: single-mode formula tracks diagonalization") {
    Draw d(303);
    for (int k = 0; k < 100; ++k) {
        const double w = d.uniform(1.0, 5.0);
        const double g = w * d.uniform(0.0, 0.5);
        const double delta = w * d.uniform(0.001, 0.05);
        const rabi::QrmParams p{delta, 0.0, w, g};
        const auto t = rabi::converged_truncation(p, 2, 1e-12 * w);
        const double numeric = rabi::transition_frequency(rabi::solve(p, t), 0, 1);
        CHECK(test::rel_err(numeric, single_mode_renorm(delta, g, w, kQuiet)) < 0.01);
    }
}

}  // TEST_SUITE
