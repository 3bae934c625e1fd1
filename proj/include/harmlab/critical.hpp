#pragma once

#include <stdexcept>
#include <vector>

#include "harmlab/field.hpp"
#include "harmlab/interval.hpp"

namespace harmlab {

enum class CritKind { minimum, saddle, maximum };

struct CriticalPoint {
    SpherePoint point;
    double value;
    CritKind kind;
    double residual;  // |grad f| after refinement
    double hess_det;
};

struct CritSummary {
    int n_min = 0;
    int n_saddle = 0;
    int n_max = 0;
    std::vector<int> interval_counts;

    int total() const { return n_min + n_saddle + n_max; }
};

// Converged Newton point with a numerically singular Hessian; signals a
// pathological (zonal-like) field or a tolerance problem.
struct DegenerateCritical : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Morse relation failed after deduplication: points were missed. Callers may
// retry with a larger grid factor.
struct IncompleteMorse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CritOptions {
    int grid_factor = 8;           // kappa: seeds from a (kappa ell x 2 kappa ell) grid per chart
    double dedup_radius = 0.01;    // geodesic dedup radius in units of 1/ell
    double newton_tol = 1e-10;     // convergence when |grad| <= newton_tol * lambda
    double accept_tol = 1e-8;      // accepted residual bound (CriticalPoint invariant)
    double degenerate_tol = 1e-10; // |det H| < degenerate_tol * lambda^2 flags degeneracy
    int max_newton = 30;
    double seed_grad_factor = 0.5; // also seed cells with |grad| below factor * cell * lambda
};

// Locate, refine, classify and deduplicate all critical points. The result
// is sorted by (theta, phi) and satisfies the Morse relation
// n_min - n_saddle + n_max = 2, else IncompleteMorse is thrown.
std::vector<CriticalPoint> find_critical_points(const HarmonicField& field,
                                                const CritOptions& opt = {});

int count_in_interval(const std::vector<CriticalPoint>& points, const Interval& I);

CritSummary summarize(const std::vector<CriticalPoint>& points,
                      const std::vector<Interval>& intervals = {});

// Euler characteristic of the excursion set {f >= u} by Morse counting.
int euler_characteristic(const std::vector<CriticalPoint>& points, double u);

}  // namespace harmlab
