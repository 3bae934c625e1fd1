#include "harmlab/theory.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "harmlab/legendre.hpp"
#include "harmlab/polyspectra.hpp"
#include "harmlab/quadrature.hpp"
#include "harmlab/rng.hpp"

namespace harmlab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt3 = 1.73205080756887729352744634150587;

double clamp_for_density(double v) { return std::min(12.0, std::max(-12.0, v)); }
}  // namespace

double density_pi1c(double t) {
    return kSqrt3 / std::sqrt(8.0 * kPi) * (2.0 * std::exp(-t * t) + t * t - 1.0) *
           std::exp(-t * t / 2.0);
}

double density_p3c(double t) {
    const double t2 = t * t;
    return 1.0 / std::sqrt(8.0 * kPi) * std::exp(-1.5 * t2) *
           (2.0 - 6.0 * t2 - std::exp(t2) * (1.0 - 4.0 * t2 + t2 * t2));
}

double integrate_pi1c(const Interval& I, double tol) {
    const double a = clamp_for_density(I.lo), b = clamp_for_density(I.hi);
    if (a >= b) return 0.0;
    return integrate_adaptive([](double t) { return density_pi1c(t); }, a, b, tol, 16);
}

double integrate_p3c(const Interval& I, double tol) {
    const double a = clamp_for_density(I.lo), b = clamp_for_density(I.hi);
    if (a >= b) return 0.0;
    return integrate_adaptive([](double t) { return density_p3c(t); }, a, b, tol, 16);
}

double nu_c(const Interval& I) {
    const double v = integrate_p3c(I);
    return v * v;
}

PredictedStats predicted_moments(int ell) {
    if (ell < 2) throw std::domain_error("predicted_moments: ell must be >= 2");
    const double lam = static_cast<double>(ell) * (ell + 1.0);
    const double logl = std::log(static_cast<double>(ell));
    PredictedStats s;
    s.mean_crit = 2.0 / kSqrt3 * lam;
    s.var_crit_leading = static_cast<double>(ell) * ell * logl / (27.0 * kPi * kPi);
    s.var_h4_leading = 576.0 * logl / (static_cast<double>(ell) * ell);
    s.var_A_leading = s.var_crit_leading;
    s.cov_crit_A_leading = s.var_crit_leading;
    s.scale_A = -lam / (72.0 * kSqrt3 * kPi);
    return s;
}

double trispectrum_proxy(double h4, int ell) {
    const double lam = static_cast<double>(ell) * (ell + 1.0);
    return -lam / (72.0 * kSqrt3 * kPi) * h4;
}

double trispectrum_proxy_standardized(double h4, int ell) {
    return trispectrum_proxy(h4, ell) / std::sqrt(predicted_moments(ell).var_A_leading);
}

namespace {

// delta-limit weights on the gradient variables, up to the common
// 1/(sqrt(2 pi) tau1) factor which cancels against lambda in the
// coefficient definitions
double delta_weight(int a) {
    switch (a) {
        case 0: return 1.0;
        case 2: return -1.0;
        case 4: return 3.0;
        default: return 0.0;  // odd orders
    }
}

double quad_form(double y3, double y4, double y5) {
    return y3 * y5 / std::sqrt(8.0) + y3 * y3 / 8.0 - y4 * y4 / 8.0;
}

bool pattern_is(const HermitePattern& p, int a, int b, int c, int d, int e) {
    return p.q[0] == a && p.q[1] == b && p.q[2] == c && p.q[3] == d && p.q[4] == e;
}

}  // namespace

McValue projection_coefficient(const HermitePattern& pattern, CoeffMethod method,
                               std::uint64_t n_samples, std::uint64_t seed) {
    int sum = 0;
    for (int q : pattern.q) {
        if (q < 0) throw std::invalid_argument("projection_coefficient: negative exponent");
        sum += q;
    }
    if (sum != 4)
        throw std::invalid_argument("projection_coefficient: unsupported pattern, exponents must sum to 4");

    if (method == CoeffMethod::closed || method == CoeffMethod::liwei_assisted) {
        const bool use_liwei = method == CoeffMethod::liwei_assisted;
        if (pattern_is(pattern, 4, 0, 0, 0, 0) || pattern_is(pattern, 0, 4, 0, 0, 0)) {
            if (use_liwei)
                return {3.0 * moment_Ir(0, IrMethod::liwei_integral).value / (8.0 * kPi), 0.0};
            return {kSqrt3 / (2.0 * kPi), 0.0};
        }
        if (pattern_is(pattern, 0, 0, 0, 0, 4)) {
            if (use_liwei) {
                const double I0 = moment_Ir(0, IrMethod::liwei_integral).value;
                const auto I2 = moment_Ir(2, IrMethod::montecarlo, n_samples, seed + 2);
                const auto I4 = moment_Ir(4, IrMethod::montecarlo, n_samples, seed + 4);
                const double v = (I4.value / 4608.0 - I2.value / 32.0 + 3.0 * I0 / 8.0) / kPi;
                const double e = std::hypot(I4.stderr_ / 4608.0, I2.stderr_ / 32.0) / kPi;
                return {v, e};
            }
            return {-7.0 / (27.0 * kSqrt3 * kPi), 0.0};
        }
        if (pattern_is(pattern, 0, 2, 0, 0, 2) || pattern_is(pattern, 2, 0, 0, 0, 2)) {
            if (use_liwei) {
                const double I0 = moment_Ir(0, IrMethod::liwei_integral).value;
                const auto I2 = moment_Ir(2, IrMethod::montecarlo, n_samples, seed + 2);
                return {(-I2.value / 192.0 + I0 / 8.0) / kPi, I2.stderr_ / (192.0 * kPi)};
            }
            return {-1.0 / (3.0 * kSqrt3 * kPi), 0.0};
        }
        throw std::invalid_argument(
            "projection_coefficient: closed form known only for H4(Y1|Y2), H4(Y5) and "
            "H2(Y1|Y2)H2(Y5)");
    }

    // Monte Carlo: the gradient-variable delta weights factor out analytically
    const double w12 = delta_weight(pattern.q[0]) * delta_weight(pattern.q[1]);
    if (w12 == 0.0) return {0.0, 0.0};

    Rng rng = Rng::stream(seed, 0x50415454ULL,
                          static_cast<std::uint64_t>(pattern.q[2] * 25 + pattern.q[3] * 5 + pattern.q[4]));
    double acc = 0.0, acc2 = 0.0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const double y3 = rng.gaussian();
        const double y4 = rng.gaussian();
        const double y5 = rng.gaussian();
        const double v = std::fabs(quad_form(y3, y4, y5)) * hermite(pattern.q[2], y3) *
                         hermite(pattern.q[3], y4) * hermite(pattern.q[4], y5);
        acc += v;
        acc2 += v * v;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = acc / n;
    const double var = std::max(0.0, acc2 / n - mean * mean);
    const double f = w12 / kPi;
    return {f * mean, std::fabs(f) * std::sqrt(var / n)};
}

std::vector<HermitePattern> vanishing_patterns() {
    return {
        // H3 H1 with an odd exponent on a gradient variable or on Y4
        {{1, 0, 3, 0, 0}},
        {{0, 1, 0, 0, 3}},
        {{3, 1, 0, 0, 0}},
        {{0, 0, 3, 1, 0}},
        {{0, 0, 0, 3, 1}},
        // H2 H1 H1
        {{0, 0, 2, 1, 1}},
        {{1, 1, 0, 0, 2}},
        {{1, 0, 1, 2, 0}},
        // four distinct H1 factors
        {{1, 1, 1, 0, 1}},
        {{1, 1, 1, 1, 0}},
        {{0, 1, 1, 1, 1}},
        {{1, 0, 1, 1, 1}},
    };
}

namespace {

// symmetric 3x3 eigen-decomposition by cyclic Jacobi; returns eigenvalues,
// fills V with eigenvectors in columns when requested
std::array<double, 3> jacobi_sym3(Mat3 a, Mat3* V) {
    Mat3 v{};
    v[0][0] = v[1][1] = v[2][2] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = std::fabs(a[0][1]) + std::fabs(a[0][2]) + std::fabs(a[1][2]);
        const double diag = std::fabs(a[0][0]) + std::fabs(a[1][1]) + std::fabs(a[2][2]);
        if (off <= 1e-15 * (diag + 1e-300)) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (V) *V = v;
    return {a[0][0], a[1][1], a[2][2]};
}

Mat3 matmul3(const Mat3& x, const Mat3& y) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += x[i][k] * y[k][j];
    return r;
}

}  // namespace

double liwei_expectation(const Mat3& A, const Mat3& Sigma, double tol) {
    // eigenvalues of Sigma*A via the similar symmetric matrix R^T A R with
    // Sigma = R R^T from the spectral square root (robust for PSD Sigma)
    Mat3 V{};
    const auto w = jacobi_sym3(Sigma, &V);
    Mat3 R{};
    for (int i = 0; i < 3; ++i) {
        const double d = std::sqrt(std::max(0.0, w[i]));
        for (int k = 0; k < 3; ++k) R[k][i] = V[k][i] * d;
    }
    Mat3 Rt{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Rt[i][j] = R[j][i];
    const auto mu = jacobi_sym3(matmul3(Rt, matmul3(A, R)), nullptr);

    double mu_max = 0.0, s1 = 0.0, s2 = 0.0;
    for (double m : mu) {
        mu_max = std::max(mu_max, std::fabs(m));
        s1 += m;
        s2 += m * m;
    }
    if (mu_max == 0.0) return 0.0;

    auto integrand = [&mu, s1, s2](double t) {
        if (t < 1e-7) return s2 + 0.5 * s1 * s1;
        std::complex<double> d(1.0, 0.0);
        for (double m : mu) d /= std::sqrt(std::complex<double>(1.0, -2.0 * t * m));
        return (1.0 - d.real()) / (t * t);
    };

    // finite part plus the analytic 1/t^2 tail; |Re d| decays at least like
    // (2 t mu_max)^{-1/2}, so the dropped remainder is far below tol at T
    const double T = 4000.0 / mu_max;
    const double main_part = integrate_adaptive(integrand, 0.0, T, tol * 0.1, 64);
    return 2.0 / kPi * (main_part + 1.0 / T);
}

McValue moment_Ir(int r, IrMethod method, std::uint64_t n_samples, std::uint64_t seed) {
    if (r != 0 && r != 2 && r != 4) throw std::domain_error("moment_Ir: r must be 0, 2 or 4");
    if (method == IrMethod::liwei_integral) {
        if (r != 0) throw std::domain_error("moment_Ir: liwei_integral supports r = 0 only");
        const Mat3 A{{{0.0, 0.0, 0.5}, {0.0, -1.0, 0.0}, {0.5, 0.0, 0.0}}};
        const Mat3 Sigma{{{3.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 3.0}}};
        return {liwei_expectation(A, Sigma), 0.0};
    }
    // Cholesky factor of [[3,0,1],[0,1,0],[1,0,3]]
    const double l11 = std::sqrt(3.0);
    const double l31 = 1.0 / l11;
    const double l33 = std::sqrt(3.0 - l31 * l31);
    Rng rng = Rng::stream(seed, 0x4952ULL, static_cast<std::uint64_t>(r));
    double acc = 0.0, acc2 = 0.0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const double g1 = rng.gaussian();
        const double g2 = rng.gaussian();
        const double g3 = rng.gaussian();
        const double z1 = l11 * g1;
        const double z3 = l31 * g1 + l33 * g3;
        const double base = std::fabs(z1 * z3 - g2 * g2);
        double v = base;
        if (r > 0) {
            const double d2 = (z1 - 3.0 * z3) * (z1 - 3.0 * z3);
            v = (r == 2) ? base * d2 : base * d2 * d2;
        }
        acc += v;
        acc2 += v * v;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = acc / n;
    const double var = std::max(0.0, acc2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

CoeffReport coeff_report(CoeffMethod method, std::uint64_t n_samples, std::uint64_t seed) {
    CoeffReport rep{};
    rep.method = method;
    if (method == CoeffMethod::closed) {
        rep.k2 = kSqrt3 / (2.0 * kPi);
        rep.k5 = -7.0 / (27.0 * kSqrt3 * kPi);
        rep.h25 = -1.0 / (3.0 * kSqrt3 * kPi);
        rep.I0 = 4.0 / kSqrt3;
        rep.I2 = 32.0 * 5.0 / kSqrt3;
        rep.I4 = 256.0 * 25.0 * 7.0 / (3.0 * kSqrt3);
        return rep;
    }
    if (method == CoeffMethod::liwei_assisted) {
        const double I0 = moment_Ir(0, IrMethod::liwei_integral).value;
        const auto I2 = moment_Ir(2, IrMethod::montecarlo, n_samples, seed + 2);
        const auto I4 = moment_Ir(4, IrMethod::montecarlo, n_samples, seed + 4);
        rep.I0 = I0;
        rep.I2 = I2.value;
        rep.I2_err = I2.stderr_;
        rep.I4 = I4.value;
        rep.I4_err = I4.stderr_;
        rep.k2 = 3.0 * I0 / (8.0 * kPi);
        rep.k5 = (I4.value / 4608.0 - I2.value / 32.0 + 3.0 * I0 / 8.0) / kPi;
        rep.k5_err = std::hypot(I4.stderr_ / 4608.0, I2.stderr_ / 32.0) / kPi;
        rep.h25 = (-I2.value / 192.0 + I0 / 8.0) / kPi;
        rep.h25_err = I2.stderr_ / (192.0 * kPi);
        return rep;
    }
    const auto k2 = projection_coefficient({{0, 4, 0, 0, 0}}, CoeffMethod::montecarlo,
                                           n_samples, seed + 11);
    const auto k5 = projection_coefficient({{0, 0, 0, 0, 4}}, CoeffMethod::montecarlo,
                                           n_samples, seed + 12);
    const auto h25 = projection_coefficient({{0, 2, 0, 0, 2}}, CoeffMethod::montecarlo,
                                            n_samples, seed + 13);
    rep.k2 = k2.value;
    rep.k2_err = k2.stderr_;
    rep.k5 = k5.value;
    rep.k5_err = k5.stderr_;
    rep.h25 = h25.value;
    rep.h25_err = h25.stderr_;
    const auto I0 = moment_Ir(0, IrMethod::montecarlo, n_samples, seed + 14);
    const auto I2 = moment_Ir(2, IrMethod::montecarlo, n_samples, seed + 15);
    const auto I4 = moment_Ir(4, IrMethod::montecarlo, n_samples, seed + 16);
    rep.I0 = I0.value;
    rep.I0_err = I0.stderr_;
    rep.I2 = I2.value;
    rep.I2_err = I2.stderr_;
    rep.I4 = I4.value;
    rep.I4_err = I4.stderr_;
    return rep;
}

namespace {

// panel quadrature sized to resolve the oscillation period 2 pi / ell
double legendre_panel_integral(int ell, const std::function<double(double)>& f,
                               double tol = 1e-9) {
    const int panels = std::max(64, ell);
    return integrate_adaptive(f, 0.0, kPi / 2.0, tol, panels);
}

}  // namespace

LemmaIntegral lemma_integral(int ell, int r1, int r2) {
    if (ell < 2) throw std::domain_error("lemma_integral: ell must be >= 2");
    if (r1 < 0 || r1 > 2 || r2 < 0 || r2 > 2)
        throw std::domain_error("lemma_integral: r1, r2 must be 0, 1 or 2");
    auto f = [ell, r1, r2](double phi) {
        const auto t = legendre_eval(ell, std::cos(phi));
        const double s = std::sin(phi);
        auto fac = [&](int r) {
            if (r == 0) return t.p;
            if (r == 1) return t.dp * s;
            return t.ddp * s * s;
        };
        const double a = fac(r1), b = fac(r2);
        return a * a * b * b * s;
    };
    LemmaIntegral out;
    out.value = legendre_panel_integral(ell, f);
    const double parity = 2.0 + ((r1 + r2) % 2 == 0 ? 1.0 : -1.0);
    out.asymptotic = parity * std::pow(static_cast<double>(ell), 2.0 * (r1 + r2)) *
                     std::log(static_cast<double>(ell)) /
                     (2.0 * kPi * kPi * static_cast<double>(ell) * ell);
    return out;
}

double lemma_bb_integral(int ell, int k) {
    if (ell < 2) throw std::domain_error("lemma_bb_integral: ell must be >= 2");
    if (k < 1 || k > 4) throw std::domain_error("lemma_bb_integral: k must be 1..4");
    auto f = [ell, k](double phi) {
        const auto t = legendre_eval(ell, std::cos(phi));
        const double s = std::sin(phi);
        return std::pow(std::fabs(t.dp), k) * std::pow(std::fabs(t.ddp * s * s), 4 - k) * s;
    };
    // |.|^k integrands have kinks at the zeros for odd k; panel doubling
    // converges only algebraically there, and the bound checks downstream
    // need far less than spectral accuracy
    return legendre_panel_integral(ell, f, 1e-5);
}

double log_regression_slope(const std::vector<int>& ells, const std::vector<double>& ys) {
    if (ells.size() != ys.size() || ells.size() < 2)
        throw std::invalid_argument("log_regression_slope: need matching arrays of size >= 2");
    const double n = static_cast<double>(ells.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ells.size(); ++i) {
        const double x = std::log(static_cast<double>(ells[i]));
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct JetFieldCov {
    double y2, y3, y5;
};

// E[Y_i(xbar) f(y(phi))] for xbar and y(phi) both on the equator, from the
// closed-form derivative covariances of P_ell(cos d)
JetFieldCov jet_field_cov(int ell, double phi) {
    const double lam = static_cast<double>(ell) * (ell + 1.0);
    const double a1 = std::sqrt(3.0 * lam - 2.0) / (lam * std::sqrt(lam - 2.0));
    const double a2 = (lam + 2.0) / (lam * std::sqrt(lam - 2.0) * std::sqrt(3.0 * lam - 2.0));
    const auto t = legendre_eval(ell, std::cos(phi));
    const double s = std::sin(phi), c = std::cos(phi);
    JetFieldCov f;
    f.y2 = std::sqrt(2.0 / lam) * t.dp * s;
    f.y3 = -std::sqrt(8.0) / (std::sqrt(lam) * std::sqrt(3.0 * lam - 2.0)) * t.dp * c;
    f.y5 = a1 * (t.ddp * s * s - t.dp * c) + a2 * t.dp * c;
    return f;
}

}  // namespace

DominantTerms dominant_covariance_terms(int ell) {
    if (ell < 2) throw std::domain_error("dominant_covariance_terms: ell must be >= 2");
    DominantTerms out{};
    out.t1 = legendre_panel_integral(ell, [ell](double phi) {
        const double v = jet_field_cov(ell, phi).y2;
        return 24.0 * v * v * v * v * std::sin(phi);
    });
    out.t2 = legendre_panel_integral(ell, [ell](double phi) {
        const double v = jet_field_cov(ell, phi).y5;
        return 24.0 * v * v * v * v * std::sin(phi);
    });
    out.t3 = legendre_panel_integral(ell, [ell](double phi) {
        const auto f = jet_field_cov(ell, phi);
        return 24.0 * f.y2 * f.y2 * f.y5 * f.y5 * std::sin(phi);
    });
    const double logl = std::log(static_cast<double>(ell));
    const double ell2 = static_cast<double>(ell) * ell;
    out.target1 = 24.0 * 6.0 / (kPi * kPi) * logl / ell2;
    out.target2 = 24.0 * 13.5 / (kPi * kPi) * logl / ell2;
    out.target3 = 24.0 * 3.0 / (kPi * kPi) * logl / ell2;

    // the theta-derivative and mixed-derivative covariances vanish along the
    // equator; evaluate the closed-form factors as written
    const double lam = static_cast<double>(ell) * (ell + 1.0);
    const double cthx = std::cos(kPi / 2.0);  // ~6e-17, not exactly zero
    double worst1 = 0.0, worst4 = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double phi = kPi / 2.0 * i / 21.0;
        const auto t = legendre_eval(ell, std::cos(phi));
        // d<x,y>/dtheta_x at theta_x = theta_y = pi/2
        const double dcos_dth = -cthx + cthx * std::cos(phi);
        const double e_d1f = t.dp * dcos_dth;
        worst1 = std::max(worst1, std::fabs(std::sqrt(2.0 / lam) * e_d1f));
        // (1/sin theta_x) d^2/dtheta_x dphi_x of P(<x,y>)
        const double dcos_dph = std::sin(phi);
        const double d2cos = cthx * std::sin(phi);
        const double e_d12f = t.ddp * dcos_dth * dcos_dph + t.dp * d2cos;
        worst4 = std::max(worst4,
                          std::fabs(2.0 * std::sqrt(2.0) /
                                    (std::sqrt(lam) * std::sqrt(lam - 2.0)) * e_d12f));
    }
    out.subdominant_y1 = worst1;
    out.subdominant_y4 = worst4;
    return out;
}

double odd_term_integral(int ell) {
    if (ell < 2) throw std::domain_error("odd_term_integral: ell must be >= 2");
    return legendre_panel_integral(ell, [ell](double phi) {
        const auto f = jet_field_cov(ell, phi);
        return 24.0 * f.y3 * f.y3 * f.y3 * f.y5 * std::sin(phi);
    });
}

}  // namespace harmlab
