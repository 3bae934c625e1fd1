#include "harmlab/verify.hpp"

#include <cmath>

#include "harmlab/critical.hpp"
#include "harmlab/field.hpp"
#include "harmlab/legendre.hpp"
#include "harmlab/polyspectra.hpp"
#include "harmlab/rng.hpp"
#include "harmlab/sigma.hpp"
#include "harmlab/theory.hpp"

namespace harmlab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt3 = 1.73205080756887729352744634150587;

CheckResult abs_check(std::string name, double value, double target, double tol,
                      std::string detail = "") {
    CheckResult c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    c.tolerance = tol;
    c.pass = std::fabs(value - target) <= tol;
    c.detail = std::move(detail);
    return c;
}

CheckResult rel_check(std::string name, double value, double target, double rel_tol) {
    CheckResult c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    c.tolerance = rel_tol;
    c.pass = std::fabs(value - target) <= rel_tol * std::max(1e-300, std::fabs(target));
    return c;
}
}  // namespace

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

std::vector<CheckResult> verify_sigma() {
    std::vector<CheckResult> out;

    for (int ell : {2, 3, 10, 100, 10000}) {
        const auto [sig, L] = sigma_and_cholesky(ell);
        const auto Lm = L.matrix();
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) scale = std::max(scale, std::fabs(sig.m[i][j]));
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                double p = 0.0;
                for (int k = 0; k < 5; ++k) p += Lm[i][k] * Lm[j][k];
                worst = std::max(worst, std::fabs(p - sig.m[i][j]) / scale);
            }
        }
        out.push_back(abs_check("cholesky_product_ell" + std::to_string(ell), worst, 0.0, 1e-12));
        double cross = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 2; j < 5; ++j) cross = std::max(cross, std::fabs(sig.m[i][j]));
        out.push_back(abs_check("gradient_hessian_block_ell" + std::to_string(ell), cross, 0.0, 0.0));
    }

    {
        const auto [sig, L] = sigma_and_cholesky(2);
        out.push_back(abs_check("ell2_c11", sig.m[2][2], 12.0, 1e-12));
        out.push_back(abs_check("ell2_c13", sig.m[2][4], 6.0, 1e-12));
        out.push_back(abs_check("ell2_c22", sig.m[3][3], 3.0, 1e-12));
        out.push_back(abs_check("ell2_tau3", L.tau3, 2.0 * kSqrt3, 1e-12));
        out.push_back(abs_check("ell2_tau5", L.tau5, 3.0, 1e-12));
    }
    {
        const auto [sig, L] = sigma_and_cholesky(10000);
        (void)sig;
        const double lam = 10000.0 * 10001.0;
        out.push_back(
            abs_check("tau3_tau5_ratio", L.tau3 * L.tau5 / (lam * lam), 1.0 / std::sqrt(8.0), 1e-3));
    }

    // Morse relation and the degree-2 count on sampled fields
    for (int ell : {2, 5, 10}) {
        for (int rep = 0; rep < 3; ++rep) {
            const auto field = HarmonicField::sample(ell, replicate_seed(1234, ell, rep));
            const auto s = summarize(find_critical_points(field));
            out.push_back(abs_check(
                "morse_ell" + std::to_string(ell) + "_r" + std::to_string(rep),
                s.n_min - s.n_saddle + s.n_max, 2.0, 0.0));
            if (ell == 2) {
                out.push_back(abs_check("count_ell2_r" + std::to_string(rep), s.total(), 6.0, 0.0));
            }
        }
    }

    // eigenfunction trace identity at 100 random points
    {
        const int ell = 10;
        const auto field = HarmonicField::sample(ell, 777001);
        const double lam = field.lambda();
        Rng rng(31);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double z = 2.0 * rng.uniform() - 1.0;
            const SpherePoint x{std::acos(z), 2.0 * kPi * rng.uniform()};
            const Jet2 j = field.jet(x);
            const double scale = std::max(std::fabs(lam * j.f), 0.05 * lam);
            worst = std::max(worst, std::fabs(j.hess_trace() + lam * j.f) / scale);
        }
        out.push_back(abs_check("trace_identity", worst, 0.0, 1e-8));
    }

    // h0 and h1
    {
        const int ell = 10;
        const auto field = HarmonicField::sample(ell, 777002);
        const auto grid = build_grid(ell, 4);
        out.push_back(abs_check("h0_equals_4pi", sample_polyspectrum(field, 0, grid), 4.0 * kPi,
                                1e-10));
        out.push_back(abs_check("h1_vanishes", sample_polyspectrum(field, 1, grid), 0.0, 1e-10));
    }
    return out;
}

std::vector<CheckResult> verify_densities() {
    std::vector<CheckResult> out;
    out.push_back(abs_check("pi1c_at_0", density_pi1c(0.0), kSqrt3 / std::sqrt(8.0 * kPi), 1e-12));
    out.push_back(abs_check("pi1c_normalization", integrate_pi1c(Interval::all()), 1.0, 1e-8));
    out.push_back(abs_check("p3c_integral_R", integrate_p3c(Interval::all()), 0.0, 1e-8));
    out.push_back(abs_check("p3c_integral_halfline", integrate_p3c(Interval::ray(0.0)), 0.0, 1e-8));
    const double nu1 = nu_c(Interval::ray(1.0));
    CheckResult c;
    c.name = "nu_c_ray1_nondegenerate";
    c.value = nu1;
    c.target = 0.0;
    c.tolerance = 0.0;
    c.pass = nu1 > 1e-6;
    out.push_back(c);
    out.push_back(abs_check("nu_c_R_degenerate", nu_c(Interval::all()), 0.0, 1e-16));
    return out;
}

std::vector<CheckResult> verify_coeffs(std::uint64_t mc_samples, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const auto closed = coeff_report(CoeffMethod::closed);

    // Monte Carlo agreement within 3 standard errors
    const auto mc = coeff_report(CoeffMethod::montecarlo, mc_samples, seed);
    auto se_check = [&out](const std::string& name, double v, double target, double se) {
        CheckResult c;
        c.name = name;
        c.value = v;
        c.target = target;
        c.tolerance = 3.0 * se;
        c.pass = std::fabs(v - target) <= 3.0 * se;
        out.push_back(c);
    };
    se_check("k2_mc_vs_closed", mc.k2, closed.k2, mc.k2_err);
    se_check("k5_mc_vs_closed", mc.k5, closed.k5, mc.k5_err);
    se_check("h25_mc_vs_closed", mc.h25, closed.h25, mc.h25_err);

    // Li-Wei quadratures
    out.push_back(abs_check("liwei_paper_pair", moment_Ir(0, IrMethod::liwei_integral).value,
                            4.0 / kSqrt3, 1e-6));
    {
        const Mat3 I3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        out.push_back(abs_check("liwei_chi2_3", liwei_expectation(I3, I3), 3.0, 1e-6));
        const Mat3 D{{{1.0, 0, 0}, {0, -1.0, 0}, {0, 0, 0}}};
        out.push_back(abs_check("liwei_diag_pm1", liwei_expectation(D, I3), 4.0 / kPi, 1e-6));
    }

    // I moments at a 10x sample budget
    const auto i2 = moment_Ir(2, IrMethod::montecarlo, 10 * mc_samples, seed + 2);
    const auto i4 = moment_Ir(4, IrMethod::montecarlo, 10 * mc_samples, seed + 4);
    se_check("I2_mc", i2.value, closed.I2, i2.stderr_);
    se_check("I4_mc", i4.value, closed.I4, i4.stderr_);

    // vanishing patterns
    int idx = 0;
    for (const auto& p : vanishing_patterns()) {
        const auto v = projection_coefficient(p, CoeffMethod::montecarlo, mc_samples, seed + 100 + idx);
        CheckResult c;
        c.name = "vanishing_pattern_" + std::to_string(idx++);
        c.value = v.value;
        c.target = 0.0;
        c.tolerance = 3.0 * v.stderr_ + 1e-15;
        c.pass = std::fabs(v.value) <= c.tolerance;
        out.push_back(c);
    }
    return out;
}

std::vector<CheckResult> verify_integrals() {
    std::vector<CheckResult> out;
    const std::vector<int> ladder{64, 128, 256, 512, 1024, 2048};

    for (int r : {0, 1, 2}) {
        std::vector<double> ys;
        for (int ell : ladder) {
            const auto li = lemma_integral(ell, r, r);
            ys.push_back(li.value * static_cast<double>(ell) * ell /
                         std::pow(static_cast<double>(ell), 4.0 * r));
        }
        const double slope = log_regression_slope(ladder, ys);
        out.push_back(
            rel_check("lemma_slope_r" + std::to_string(r), slope, 3.0 / (2.0 * kPi * kPi), 0.10));
    }
    {
        std::vector<double> ys;
        for (int ell : ladder) {
            const auto li = lemma_integral(ell, 0, 1);
            ys.push_back(li.value * static_cast<double>(ell) * ell /
                         std::pow(static_cast<double>(ell), 2.0));
        }
        const double slope = log_regression_slope(ladder, ys);
        out.push_back(rel_check("lemma_slope_mixed01", slope, 1.0 / (2.0 * kPi * kPi), 0.10));
    }

    for (int k = 1; k <= 4; ++k) {
        double first = 0.0, last = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            const double ratio =
                lemma_bb_integral(ladder[i], k) / std::pow(static_cast<double>(ladder[i]), 6.0);
            if (i == 0) first = ratio;
            last = ratio;
            worst = std::max(worst, ratio);
        }
        CheckResult c;
        c.name = "lemma_bb_bounded_k" + std::to_string(k);
        c.value = last;
        c.target = first;
        c.tolerance = 0.05;
        c.pass = (worst < 1.0) && (last <= first * 1.02);
        c.detail = "no growth across the ladder";
        out.push_back(c);
    }

    // Hilb-type approximation stays inside its envelope
    {
        double worst = 0.0;
        for (int ell : {50, 100, 400}) {
            for (int r : {0, 1, 2}) {
                for (int i = 0; i < 80; ++i) {
                    const double lo = 1.0 / ell;
                    const double phi = lo + (kPi / 2.0 - lo) * (i + 0.5) / 80.0;
                    const auto h = hilb_approx(ell, r, phi);
                    const auto t = legendre_eval(ell, std::cos(phi));
                    const double exact = (r == 0) ? t.p : (r == 1 ? t.dp : t.ddp);
                    worst = std::max(worst, std::fabs(h.approx - exact) / h.envelope);
                }
            }
        }
        CheckResult c;
        c.name = "hilb_within_envelope";
        c.value = worst;
        c.target = 1.0;
        c.tolerance = 0.0;
        c.pass = worst <= 1.0;
        c.detail = "max |error|/envelope over the sampled range";
        out.push_back(c);
    }
    return out;
}

}  // namespace harmlab
