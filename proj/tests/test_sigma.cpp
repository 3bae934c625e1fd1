#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "harmlab/sigma.hpp"

using namespace harmlab;

namespace {
double max_rel_err_product(const Sigma5& s, const Lambda5& L) {
    const Mat5 Lm = L.matrix();
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) scale = std::max(scale, std::fabs(s.m[i][j]));
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            double p = 0.0;
            for (int k = 0; k < 5; ++k) p += Lm[i][k] * Lm[j][k];
            worst = std::max(worst, std::fabs(p - s.m[i][j]) / scale);
        }
    }
    return worst;
}
}

TEST_CASE("Lambda Lambda^T = Sigma across degrees") {
    for (int ell : {2, 3, 10, 100, 10000}) {
        const auto [sig, L] = sigma_and_cholesky(ell);
        CHECK(max_rel_err_product(sig, L) < 1e-12);
    }
    CHECK_THROWS_AS(sigma_and_cholesky(1), std::domain_error);
}

TEST_CASE("ell=2 closed values") {
    const auto [sig, L] = sigma_and_cholesky(2);
    CHECK(sig.m[2][2] == doctest::Approx(12.0));
    CHECK(sig.m[2][4] == doctest::Approx(6.0));
    CHECK(sig.m[3][3] == doctest::Approx(3.0));
    CHECK(sig.m[4][4] == doctest::Approx(12.0));
    const double s3 = std::sqrt(3.0);
    CHECK(L.tau1 == doctest::Approx(s3));
    CHECK(L.tau3 == doctest::Approx(2.0 * s3));
    CHECK(L.tau4 == doctest::Approx(s3));
    CHECK(L.tau2 == doctest::Approx(s3));
    CHECK(L.tau5 == doctest::Approx(3.0));
}

TEST_CASE("gradient block is independent of the Hessian block") {
    for (int ell : {2, 9, 250}) {
        const auto [sig, L] = sigma_and_cholesky(ell);
        for (int i = 0; i < 2; ++i) {
            for (int j = 2; j < 5; ++j) {
                CHECK(sig.m[i][j] == 0.0);
                CHECK(sig.m[j][i] == 0.0);
            }
        }
        (void)L;
    }
}

TEST_CASE("asymptotic tau ratios") {
    const int ell = 10000;
    const double lam = ell * (ell + 1.0);
    const auto [sig, L] = sigma_and_cholesky(ell);
    (void)sig;
    const double l = ell;
    CHECK(std::fabs(L.tau1 / (l / std::sqrt(2.0)) - 1.0) < 1e-3);
    CHECK(std::fabs(L.tau2 / (l * l / std::sqrt(24.0)) - 1.0) < 1e-3);
    CHECK(std::fabs(L.tau3 / (std::sqrt(3.0 / 8.0) * l * l) - 1.0) < 1e-3);
    CHECK(std::fabs(L.tau4 / (l * l / std::sqrt(8.0)) - 1.0) < 1e-3);
    CHECK(std::fabs(L.tau5 / (l * l / std::sqrt(3.0)) - 1.0) < 1e-3);
    CHECK(std::fabs(L.tau3 * L.tau5 / (lam * lam) - 1.0 / std::sqrt(8.0)) <= 1e-3);
}

TEST_CASE("empirical jet covariance matches sigma and whitens to identity") {
    const int ell = 5;
    const int n = 100000;
    const auto [sig, L] = sigma_and_cholesky(ell);
    (void)L;
    const SpherePoint base{1.5707963267948966, 0.4};
    const auto est = empirical_jet_covariance(ell, n, 424243, base);

    // entry (1,1) = lambda/2 = 15 within ~3 standard errors (se ~ sqrt(2/n)*15)
    const double se11 = std::sqrt(2.0 / n) * sig.m[0][0];
    CHECK(std::fabs(est.cov[0][0] - sig.m[0][0]) < 3.5 * se11);

    double max_off = 0.0;
    for (int i = 0; i < 5; ++i) {
        CHECK(std::fabs(est.whitened[i][i] - 1.0) < 0.02);
        for (int j = 0; j < 5; ++j) {
            if (i != j) max_off = std::max(max_off, std::fabs(est.whitened[i][j]));
        }
    }
    CHECK(max_off <= 0.02);
}

TEST_CASE("jet covariance is isotropic (two base points agree)") {
    const int ell = 5;
    const int n = 20000;
    const auto ea = empirical_jet_covariance(ell, n, 11, {1.5707963267948966, 0.0});
    const auto eb = empirical_jet_covariance(ell, n, 11, {0.35, 2.2});  // chart-B territory
    const auto [sig, L] = sigma_and_cholesky(ell);
    (void)L;
    const double scale = sig.m[2][2];
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            // Monte Carlo error ~ scale/sqrt(n); allow a wide band
            CHECK(std::fabs(ea.cov[i][j] - eb.cov[i][j]) / scale < 0.05);
        }
    }
}
