#include "harmlab/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace harmlab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kFourPi = 4.0 * kPi;
}  // namespace

LegendreTriple legendre_eval(int ell, double x) {
    if (ell < 0) throw std::domain_error("legendre_eval: ell must be >= 0");
    if (!(std::fabs(x) <= 1.0)) throw std::domain_error("legendre_eval: |x| must be <= 1");

    if (ell == 0) return {1.0, 0.0, 0.0};
    if (ell == 1) return {x, 1.0, 0.0};

    const double lam = static_cast<double>(ell) * (ell + 1.0);
    if (x == 1.0 || x == -1.0) {
        const double sgn = (x > 0.0) ? 1.0 : ((ell % 2 == 0) ? 1.0 : -1.0);
        const double dsgn = (x > 0.0) ? 1.0 : ((ell % 2 == 0) ? -1.0 : 1.0);
        const double p = sgn;
        const double dp = dsgn * lam / 2.0;
        const double ddp = sgn * (ell - 1.0) * ell * (ell + 1.0) * (ell + 2.0) / 8.0;
        return {p, dp, ddp};
    }

    double pm2 = 1.0, pm1 = x;
    for (int k = 2; k <= ell; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / k;
        pm2 = pm1;
        pm1 = pk;
    }
    const double p = pm1;
    const double pprev = pm2;  // P_{ell-1}
    const double s2 = (1.0 - x) * (1.0 + x);
    const double dp = ell * (pprev - x * p) / s2;

    // Second derivative through P'_{ell-1}, kept independent of the ODE so
    // the ODE residual is a meaningful check.
    double dpprev;
    if (ell >= 2) {
        // P'_{ell-1} needs P_{ell-2}; rerun the tail of the recurrence.
        double q2 = 1.0, q1 = x;
        for (int k = 2; k <= ell - 1; ++k) {
            const double qk = ((2.0 * k - 1.0) * x * q1 - (k - 1.0) * q2) / k;
            q2 = q1;
            q1 = qk;
        }
        dpprev = (ell - 1.0) * (q2 - x * q1) / s2;
    } else {
        dpprev = 0.0;
    }
    const double ddp = (ell * (dpprev - p - x * dp) + 2.0 * x * dp) / s2;
    return {p, dp, ddp};
}

namespace {

// Normalized sectoral term \bar P_{mm}(x) with overflow/underflow guarding;
// returns mantissa and binary exponent so callers can keep recurring in
// scaled space.
void diagonal_scaled(int m, double s2, double& mant, int& e2) {
    double pmm = 1.0;
    int e = 0;
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
        pmm *= s2 * fact / (fact + 1.0);
        fact += 2.0;
        if (pmm < 0x1.0p-512 && pmm > 0.0) {
            pmm *= 0x1.0p512;
            e -= 512;
        }
    }
    mant = std::sqrt((2.0 * m + 1.0) * pmm / kFourPi);
    if (m & 1) mant = -mant;
    e2 = e / 2;
}

}  // namespace

double assoc_legendre_norm(int ell, int m, double x) {
    if (ell < 0 || m < 0 || m > ell) throw std::domain_error("assoc_legendre_norm: need 0 <= m <= ell");
    if (!(std::fabs(x) <= 1.0)) throw std::domain_error("assoc_legendre_norm: |x| must be <= 1");

    const double s2 = (1.0 - x) * (1.0 + x);
    double pmm;
    int e2;
    diagonal_scaled(m, s2, pmm, e2);
    if (ell == m) return std::ldexp(pmm, e2);

    double pmmp1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
    if (ell == m + 1) return std::ldexp(pmmp1, e2);

    double oldfact = std::sqrt(2.0 * m + 3.0);
    double pll = pmmp1;
    for (int ll = m + 2; ll <= ell; ++ll) {
        const double fact = std::sqrt((4.0 * ll * ll - 1.0) / (static_cast<double>(ll) * ll - static_cast<double>(m) * m));
        pll = (x * pmmp1 - pmm / oldfact) * fact;
        oldfact = fact;
        pmm = pmmp1;
        pmmp1 = pll;
        // keep the scaled pair inside the representable range; values grow
        // away from the sectoral seed, so only an upper guard is needed
        if (std::fabs(pmmp1) > 0x1.0p500) {
            pmm = std::ldexp(pmm, -512);
            pmmp1 = std::ldexp(pmmp1, -512);
            pll = pmmp1;
            e2 += 512;
        }
    }
    return std::ldexp(pll, e2);
}

HilbResult hilb_approx(int ell, int r, double phi, const HilbOptions& opt) {
    if (ell < 1) throw std::domain_error("hilb_approx: ell must be >= 1");
    if (r < 0 || r > 2) throw std::domain_error("hilb_approx: r must be 0, 1 or 2");
    if (!(phi > 0.0) || phi > kPi / 2.0) throw std::domain_error("hilb_approx: phi must lie in (0, pi/2]");
    if (phi < opt.c_over_ell / ell)
        throw std::domain_error("hilb_approx: phi below C/ell, asymptotics not claimed there");

    const double s = std::sin(phi);
    const double phase = (r == 1) ? kPi / 4.0 : -kPi / 4.0;
    const double psi = (ell + 0.5) * phi + phase;
    const double sgn = (r == 0) ? 1.0 : -1.0;
    const double approx = std::sqrt(2.0 / kPi) * std::pow(static_cast<double>(ell), r - 0.5) /
                          std::pow(s, r + 0.5) * sgn * std::cos(psi);

    double order;
    switch (r) {
        case 0: order = 1.0 / std::sqrt(static_cast<double>(ell) * phi); break;
        case 1: order = 1.0 / (std::sqrt(static_cast<double>(ell)) * std::pow(phi, 2.5)); break;
        default: order = std::sqrt(static_cast<double>(ell)) / std::pow(phi, 3.5); break;
    }
    return {approx, opt.envelope_const * order};
}

QuadratureRule1D gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton on P_n from the Tricomi-style initial guess
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        double dx = 1.0;
        for (int it = 0; it < 60 && std::fabs(dx) > 1e-16; ++it) {
            double pm2 = 1.0, pm1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / k;
                pm2 = pm1;
                pm1 = pk;
            }
            const double p = (n == 1) ? x : pm1;
            const double pprev = (n == 1) ? 1.0 : pm2;
            dp = n * (pprev - x * p) / ((1.0 - x) * (1.0 + x));
            dx = p / dp;
            x -= dx;
        }
        const double w = 2.0 / ((1.0 - x) * (1.0 + x) * dp * dp);
        rule.nodes[i] = -x;  // ascending order, negative half first
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace detail {

void row_upward_l(int ell, double x, std::vector<double>& val) {
    val.assign(ell + 1, 0.0);
    for (int m = 0; m <= ell; ++m) val[m] = assoc_legendre_norm(ell, m, x);
}

void row_downward_m(int ell, double theta, std::vector<double>& val) {
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    val.assign(ell + 1, 0.0);

    double diag;
    int e2;
    diagonal_scaled(ell, s * s, diag, e2);
    val[ell] = std::ldexp(diag, e2);
    if (ell == 0) return;
    val[ell - 1] = -std::sqrt(2.0 * ell) * (x / s) * val[ell];
    for (int m = ell - 2; m >= 0; --m) {
        const double lm = static_cast<double>(ell) - m;
        const double lpm = static_cast<double>(ell) + m;
        const double a = std::sqrt(((lm - 1.0) * (lpm + 2.0)) / (lm * (lpm + 1.0)));
        const double b = 2.0 * (m + 1.0) * (x / s) / std::sqrt(lm * (lpm + 1.0));
        val[m] = -(a * val[m + 2] + b * val[m + 1]);
    }
}

void row_derivatives(int ell, double theta, const std::vector<double>& val,
                     std::vector<double>& dth, std::vector<double>& ddth) {
    const double s = std::sin(theta);
    const double cot = std::cos(theta) / s;
    const double lam = static_cast<double>(ell) * (ell + 1.0);
    dth.assign(ell + 1, 0.0);
    ddth.assign(ell + 1, 0.0);
    for (int m = 0; m <= ell; ++m) {
        const double up = (m + 1 <= ell)
                              ? std::sqrt((static_cast<double>(ell) - m) * (static_cast<double>(ell) + m + 1.0)) * val[m + 1]
                              : 0.0;
        double dn;
        if (m == 0) {
            dn = (ell >= 1) ? std::sqrt(lam) * (-val[1]) : 0.0;  // \bar P_{-1} = -\bar P_1
        } else {
            dn = std::sqrt((static_cast<double>(ell) + m) * (static_cast<double>(ell) - m + 1.0)) * val[m - 1];
        }
        dth[m] = 0.5 * (up - dn);
        ddth[m] = -cot * dth[m] + (static_cast<double>(m) * m / (s * s) - lam) * val[m];
    }
}

}  // namespace detail

void assoc_legendre_row(int ell, double theta, LegendreRow& out, bool derivatives) {
    const double s = std::sin(theta);
    if (s >= 0.55 && ell <= 1024) {
        detail::row_downward_m(ell, theta, out.val);
    } else {
        detail::row_upward_l(ell, std::cos(theta), out.val);
    }
    if (derivatives) {
        detail::row_derivatives(ell, theta, out.val, out.dth, out.ddth);
    } else {
        out.dth.clear();
        out.ddth.clear();
    }
}

}  // namespace harmlab
