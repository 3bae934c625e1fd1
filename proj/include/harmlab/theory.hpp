#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "harmlab/interval.hpp"

namespace harmlab {

using Mat3 = std::array<std::array<double, 3>, 3>;

// --- closed-form value densities -----------------------------------------

// Density of the expected critical-point count per value level.
double density_pi1c(double t);
// Second-chaos fluctuation density; integrates to zero over R and over
// [0, inf).
double density_p3c(double t);

double integrate_pi1c(const Interval& I, double tol = 1e-10);
double integrate_p3c(const Interval& I, double tol = 1e-10);

// nu_c(I) = ( \int_I p3c )^2 ; an interval is nondegenerate iff nu_c > 0.
double nu_c(const Interval& I);

// --- predicted moments -----------------------------------------------------

struct PredictedStats {
    double mean_crit;          // (2/sqrt3) * lambda
    double var_crit_leading;   // ell^2 log(ell) / (27 pi^2)
    double var_h4_leading;     // 576 log(ell) / ell^2
    double var_A_leading;      // equals var_crit_leading at leading order
    double cov_crit_A_leading; // equals var_crit_leading at leading order
    double scale_A;            // -lambda / (72 sqrt3 pi)
};

PredictedStats predicted_moments(int ell);

// A_ell = scale_A * h4; the standardized variant divides by
// sqrt(var_A_leading).
double trispectrum_proxy(double h4, int ell);
double trispectrum_proxy_standardized(double h4, int ell);

// --- projection coefficients of the fourth-order chaos ----------------------

struct McValue {
    double value;
    double stderr_;  // 0 for closed-form results
};

enum class CoeffMethod { closed, montecarlo, liwei_assisted };

// Hermite exponents (q1..q5) on the standardized jet variables (Y1..Y5);
// the sum must be 4.
struct HermitePattern {
    std::array<int, 5> q;
};

// Coefficient of the pattern in the fourth-chaos expansion of the critical
// point count, with the delta-limit weights on (Y1, Y2) folded in
// analytically and the asymptotic quadratic-form weights (1/sqrt8, 1/8,
// 1/8). Closed form exists for H4(Y1|Y2), H4(Y5) and H2(Y2|Y1)H2(Y5).
McValue projection_coefficient(const HermitePattern& pattern, CoeffMethod method,
                               std::uint64_t n_samples = 10'000'000,
                               std::uint64_t seed = 0x712EC7);

// Pattern families whose coefficients vanish (odd exponent on a gradient
// variable or on Y4); used by the verification suite.
std::vector<HermitePattern> vanishing_patterns();

// --- Gaussian quadratic form expectations -----------------------------------

// E|Z^T A Z| for Z ~ N(0, Sigma) via the characteristic-function integral
//   (2/pi) \int_0^inf t^{-2} { 1 - Re det(I - 2 i t Sigma A)^{-1/2} } dt
// with per-eigenvalue principal square roots. Throws QuadratureError if the
// requested tolerance is not reached.
double liwei_expectation(const Mat3& A, const Mat3& Sigma, double tol = 1e-8);

enum class IrMethod { montecarlo, liwei_integral };

// I_r = E[ |Z1 Z3 - Z2^2| (Z1 - 3 Z3)^r ] for the covariance
// [[3,0,1],[0,1,0],[1,0,3]]; r in {0,2,4}. liwei_integral supports r = 0.
McValue moment_Ir(int r, IrMethod method, std::uint64_t n_samples = 100'000'000,
                  std::uint64_t seed = 0x19A2B);

struct CoeffReport {
    double k2, k5, h25;
    double I0, I2, I4;
    CoeffMethod method;
    double k2_err, k5_err, h25_err, I0_err, I2_err, I4_err;
};

CoeffReport coeff_report(CoeffMethod method, std::uint64_t n_samples = 10'000'000,
                         std::uint64_t seed = 0xC0FFEE);

// --- Legendre power integrals and their asymptotics --------------------------

struct LemmaIntegral {
    double value;       // \int_0^{pi/2} [P^(r1) sin^r1]^2 [P^(r2) sin^r2]^2 sin dphi
    double asymptotic;  // (2 + (-1)^{r1+r2}) ell^{2(r1+r2)} log(ell) / (2 pi^2 ell^2)
};

LemmaIntegral lemma_integral(int ell, int r1, int r2);

// \int_0^{pi/2} |P'|^k |P'' sin^2|^{4-k} sin dphi, bounded by O(ell^6).
double lemma_bb_integral(int ell, int k);

// Least-squares slope of y against log(ell) over a degree ladder.
double log_regression_slope(const std::vector<int>& ells, const std::vector<double>& ys);

// --- dominant covariance terms ----------------------------------------------

struct DominantTerms {
    double t1, t2, t3;              // the three dominant quadratures
    double target1, target2, target3;  // leading asymptotics at this ell
    double subdominant_y1;          // max |E[Y1(eq) f(y)]| over phi (should be 0)
    double subdominant_y4;          // max |E[Y4(eq) f(y)]| over phi (should be 0)
};

DominantTerms dominant_covariance_terms(int ell);

// \int_0^{pi/2} E[H3(Y3) H1(Y5) H4(f(y))] sin dphi, an O(ell^{-2}) term.
double odd_term_integral(int ell);

}  // namespace harmlab
