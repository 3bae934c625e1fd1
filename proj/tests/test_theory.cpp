#include "doctest.h"

#include <cmath>

#include "harmlab/quadrature.hpp"
#include "harmlab/rng.hpp"
#include "harmlab/theory.hpp"

using namespace harmlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt3 = 1.7320508075688772935;
}

TEST_CASE("density closed values and normalizations") {
    CHECK(density_pi1c(0.0) == doctest::Approx(0.3454941494713355).epsilon(1e-12));
    CHECK(integrate_pi1c(Interval::all()) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::fabs(integrate_p3c(Interval::all())) < 1e-8);
    CHECK(std::fabs(integrate_p3c(Interval::ray(0.0))) < 1e-8);
    CHECK(nu_c(Interval::ray(1.0)) > 0.0);
    // frozen by independent quadrature (scipy.integrate.quad) during development
    CHECK(integrate_pi1c(Interval::ray(1.0)) == doctest::Approx(0.25118505273747943).epsilon(1e-7));
    CHECK(integrate_p3c(Interval::ray(1.0)) == doctest::Approx(-0.08901605491595158).epsilon(1e-6));
}

TEST_CASE("predicted moments") {
    const auto s10 = predicted_moments(10);
    CHECK(s10.mean_crit == doctest::Approx(220.0 / kSqrt3).epsilon(1e-13));
    const auto s100 = predicted_moments(100);
    CHECK(s100.var_crit_leading ==
          doctest::Approx(1e4 * std::log(100.0) / (27.0 * kPi * kPi)).epsilon(1e-13));
    CHECK(s100.var_crit_leading == doctest::Approx(172.8).epsilon(1e-3));
    for (int ell : {2, 10, 100, 5000}) {
        const auto s = predicted_moments(ell);
        CHECK(s.var_A_leading == s.var_crit_leading);
        CHECK(s.cov_crit_A_leading == s.var_crit_leading);
    }
    CHECK_THROWS_AS(predicted_moments(1), std::domain_error);
}

TEST_CASE("trispectrum proxy") {
    CHECK(trispectrum_proxy(0.0, 17) == 0.0);
    CHECK(trispectrum_proxy(1.0, 100) == doctest::Approx(-100.0 * 101.0 / (72.0 * kSqrt3 * kPi))
                                             .epsilon(1e-13));
    CHECK(trispectrum_proxy(1.0, 100) == doctest::Approx(-25.78).epsilon(1e-3));
    CHECK(trispectrum_proxy(2.5, 40) * 2.5 < 0.0);  // opposite signs
}

TEST_CASE("liwei_expectation known values") {
    const Mat3 I3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    CHECK(liwei_expectation(I3, I3) == doctest::Approx(3.0).epsilon(1e-7));

    const Mat3 A{{{0.0, 0.0, 0.5}, {0.0, -1.0, 0.0}, {0.5, 0.0, 0.0}}};
    const Mat3 Sigma{{{3.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 3.0}}};
    CHECK(std::fabs(liwei_expectation(A, Sigma) - 4.0 / kSqrt3) < 1e-6);

    const Mat3 D{{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0}}};
    CHECK(liwei_expectation(D, I3) == doctest::Approx(4.0 / kPi).epsilon(1e-7));
}

TEST_CASE("liwei matches Monte Carlo for random pairs") {
    Rng rng(90125);
    for (int trial = 0; trial < 5; ++trial) {
        Mat3 A{}, S{};
        double b[3][3], c[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                b[i][j] = rng.gaussian();
                c[i][j] = rng.gaussian();
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                A[i][j] = 0.5 * (b[i][j] + b[j][i]);
                S[i][j] = 0.0;
                for (int k = 0; k < 3; ++k) S[i][j] += c[i][k] * c[j][k];
            }
        const double exact = liwei_expectation(A, S);
        double L[3][3] = {};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j <= i; ++j) {
                double sum = S[i][j];
                for (int k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
                L[i][j] = (i == j) ? std::sqrt(sum) : sum / L[j][j];
            }
        }
        const int n = 400000;
        double acc = 0.0, acc2 = 0.0;
        for (int s = 0; s < n; ++s) {
            double g[3] = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
            double z[3] = {};
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k <= i; ++k) z[i] += L[i][k] * g[k];
            double q = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) q += z[i] * A[i][j] * z[j];
            acc += std::fabs(q);
            acc2 += q * q;
        }
        const double mean = acc / n;
        const double se = std::sqrt(std::max(0.0, acc2 / n - mean * mean) / n);
        CHECK(std::fabs(exact - mean) < 3.5 * se);
    }
}

TEST_CASE("moment_Ir closed values") {
    const auto i0 = moment_Ir(0, IrMethod::liwei_integral);
    CHECK(i0.value == doctest::Approx(4.0 / kSqrt3).epsilon(1e-7));
    CHECK(i0.stderr_ == 0.0);

    const auto i2 = moment_Ir(2, IrMethod::montecarlo, 4'000'000, 555);
    CHECK(std::fabs(i2.value - 160.0 / kSqrt3) < 3.5 * i2.stderr_);
    const auto i4 = moment_Ir(4, IrMethod::montecarlo, 4'000'000, 556);
    CHECK(std::fabs(i4.value - 44800.0 / (3.0 * kSqrt3)) < 3.5 * i4.stderr_);
    CHECK_THROWS_AS(moment_Ir(1, IrMethod::montecarlo, 10, 1), std::domain_error);
    CHECK_THROWS_AS(moment_Ir(2, IrMethod::liwei_integral, 10, 1), std::domain_error);
}

TEST_CASE("projection coefficients: closed vs Monte Carlo") {
    const auto k2c = projection_coefficient({{0, 4, 0, 0, 0}}, CoeffMethod::closed);
    CHECK(k2c.value == doctest::Approx(0.27566444771089595).epsilon(1e-12));
    const auto k5c = projection_coefficient({{0, 0, 0, 0, 4}}, CoeffMethod::closed);
    CHECK(k5c.value == doctest::Approx(-7.0 / (27.0 * kSqrt3 * kPi)).epsilon(1e-14));
    const auto h25c = projection_coefficient({{0, 2, 0, 0, 2}}, CoeffMethod::closed);
    CHECK(h25c.value == doctest::Approx(-0.0612587661579769).epsilon(1e-10));

    const std::uint64_t n = 3'000'000;
    const auto k2 = projection_coefficient({{0, 4, 0, 0, 0}}, CoeffMethod::montecarlo, n, 77);
    CHECK(std::fabs(k2.value - k2c.value) < 3.5 * k2.stderr_);
    const auto k5 = projection_coefficient({{0, 0, 0, 0, 4}}, CoeffMethod::montecarlo, n, 78);
    CHECK(std::fabs(k5.value - k5c.value) < 3.5 * k5.stderr_);
    const auto h25 = projection_coefficient({{0, 2, 0, 0, 2}}, CoeffMethod::montecarlo, n, 79);
    CHECK(std::fabs(h25.value - h25c.value) < 3.5 * h25.stderr_);

    // the two gradient variables are exchangeable
    const auto k1c = projection_coefficient({{4, 0, 0, 0, 0}}, CoeffMethod::closed);
    CHECK(k1c.value == k2c.value);

    CHECK_THROWS_AS(projection_coefficient({{1, 1, 1, 0, 0}}, CoeffMethod::montecarlo, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(projection_coefficient({{0, 0, 2, 2, 0}}, CoeffMethod::closed),
                    std::invalid_argument);
}

TEST_CASE("consistency identities between coefficients and I moments") {
    const auto rep = coeff_report(CoeffMethod::closed);
    CHECK(rep.k5 == doctest::Approx((rep.I4 / 4608.0 - rep.I2 / 32.0 + 3.0 * rep.I0 / 8.0) / kPi)
                        .epsilon(1e-13));
    CHECK(rep.h25 == doctest::Approx((-rep.I2 / 192.0 + rep.I0 / 8.0) / kPi).epsilon(1e-13));
    CHECK(rep.k2 == doctest::Approx(3.0 * rep.I0 / (8.0 * kPi)).epsilon(1e-13));

    const auto mc = coeff_report(CoeffMethod::montecarlo, 2'000'000, 424242);
    CHECK(std::fabs(mc.k2 - rep.k2) < 3.5 * mc.k2_err);
    CHECK(std::fabs(mc.I0 - rep.I0) < 3.5 * mc.I0_err);

    const auto lw = coeff_report(CoeffMethod::liwei_assisted, 2'000'000, 424243);
    CHECK(lw.k2 == doctest::Approx(rep.k2).epsilon(1e-7));
    CHECK(std::fabs(lw.k5 - rep.k5) < 3.5 * lw.k5_err);
}

TEST_CASE("vanishing patterns are zero within Monte Carlo error") {
    for (const auto& p : vanishing_patterns()) {
        const auto v = projection_coefficient(p, CoeffMethod::montecarlo, 1'000'000, 31415);
        CHECK(std::fabs(v.value) <= 3.5 * v.stderr_ + 1e-15);
    }
}

TEST_CASE("lemma integral closed case ell=2") {
    const auto li = lemma_integral(2, 0, 0);
    CHECK(li.value == doctest::Approx(3.0 / 35.0).epsilon(1e-10));
}

TEST_CASE("lemma integral slope regression (reduced ladder)") {
    const std::vector<int> ells{64, 128, 256, 512};
    for (int r : {0, 1}) {
        std::vector<double> ys;
        for (int ell : ells) {
            const auto li = lemma_integral(ell, r, r);
            ys.push_back(li.value * ell * ell / std::pow(static_cast<double>(ell), 4.0 * r));
        }
        const double slope = log_regression_slope(ells, ys);
        CHECK(std::fabs(slope / (3.0 / (2.0 * kPi * kPi)) - 1.0) < 0.12);
    }
    std::vector<double> ys;
    for (int ell : ells) {
        const auto li = lemma_integral(ell, 0, 1);
        ys.push_back(li.value * ell * ell / std::pow(static_cast<double>(ell), 2.0));
    }
    CHECK(std::fabs(log_regression_slope(ells, ys) / (1.0 / (2.0 * kPi * kPi)) - 1.0) < 0.12);
}

TEST_CASE("lemma BB integrals bounded by ell^6") {
    double prev_ratio = 0.0;
    for (int ell : {64, 128, 256}) {
        const double v = lemma_bb_integral(ell, 4);
        const double ratio = v / std::pow(static_cast<double>(ell), 6.0);
        CHECK(ratio > 0.0);
        CHECK(ratio < 1.0);
        if (prev_ratio > 0.0) CHECK(ratio < prev_ratio * 1.05);  // no growth trend
        prev_ratio = ratio;
    }
}

TEST_CASE("dominant covariance terms near their asymptotic targets") {
    const auto d = dominant_covariance_terms(512);
    CHECK(d.t1 / d.target1 > 0.5);
    CHECK(d.t1 / d.target1 < 1.5);
    CHECK(d.t2 / d.target2 > 0.5);
    CHECK(d.t2 / d.target2 < 1.5);
    CHECK(d.t3 / d.target3 > 0.5);
    CHECK(d.t3 / d.target3 < 1.5);
    CHECK(d.subdominant_y1 <= 1e-12);
    CHECK(d.subdominant_y4 <= 1e-12);
}

TEST_CASE("odd-pattern term decays faster than log(ell)/ell^2") {
    double prev = 1e300;
    for (int ell : {64, 128, 256, 512}) {
        const double v =
            std::fabs(odd_term_integral(ell)) * ell * ell / std::log(static_cast<double>(ell));
        CHECK(v < prev);
        prev = v;
    }
}
