#pragma once

#include <vector>

namespace harmlab {

// P_ell(x) together with its first two derivatives with respect to x.
struct LegendreTriple {
    double p;
    double dp;
    double ddp;
};

// Three-term upward recurrence; endpoint derivatives by closed form.
// Throws std::domain_error for ell < 0 or |x| > 1.
LegendreTriple legendre_eval(int ell, double x);

// Fully normalized associated Legendre function \bar P_{ell m}(x) with the
// Condon-Shortley phase, normalized so that the real spherical-harmonic
// basis built from it is orthonormal:
//   Y_{ell 0} = \bar P_{ell 0},  Y_{ell m}^{c,s} = sqrt(2) \bar P_{ell m} cos/sin(m phi)
// Stable for ell up to at least 10^4 (scaled recurrences).
double assoc_legendre_norm(int ell, int m, double x);

// Oscillatory high-degree approximation of P_ell^{(r)}(cos phi) plus an
// error envelope (remainder order times a configurable constant).
struct HilbResult {
    double approx;
    double envelope;
};

struct HilbOptions {
    double envelope_const = 5.0;
    double c_over_ell = 1.0;  // validity threshold: phi >= c_over_ell / ell
};

HilbResult hilb_approx(int ell, int r, double phi, const HilbOptions& opt = {});

// Gauss-Legendre rule on (-1,1): N nodes integrate polynomials of degree
// <= 2N-1 exactly. Weights are positive and sum to 2.
struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule1D gauss_legendre(int n);

// Row of normalized associated Legendre values at fixed ell and colatitude:
// val[m] = \bar P_{ell m}(cos theta) for m = 0..ell, plus d/dtheta and
// d^2/dtheta^2 rows when requested.
struct LegendreRow {
    std::vector<double> val;
    std::vector<double> dth;
    std::vector<double> ddth;
};

// Dispatches to a downward-in-m recurrence (O(ell), valid away from the
// poles) or the per-m upward-in-degree reference path.
void assoc_legendre_row(int ell, double theta, LegendreRow& out, bool derivatives = true);

namespace detail {
// Reference path: per-m upward-in-degree recurrence, valid for all theta.
void row_upward_l(int ell, double x, std::vector<double>& val);
// Fast path: downward-in-m recurrence, requires sin(theta) >= ~0.55.
void row_downward_m(int ell, double theta, std::vector<double>& val);
// Derivative rows from the value row (same-ell neighbour identities + ODE).
void row_derivatives(int ell, double theta, const std::vector<double>& val,
                     std::vector<double>& dth, std::vector<double>& ddth);
}  // namespace detail

}  // namespace harmlab
