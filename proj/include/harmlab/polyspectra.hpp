#pragma once

#include <span>
#include <vector>

#include "harmlab/field.hpp"

namespace harmlab {

// Probabilists' Hermite polynomial H_q(u).
double hermite(int q, double u);

// Band-limit-exact quadrature grid: Gauss-Legendre colatitudes x uniform
// longitudes, sized to integrate spherical polynomials of degree
// <= qmax*ell exactly.
struct SphereGrid {
    int ell = 0;
    int qmax = 0;
    std::vector<double> cos_theta;      // Gauss-Legendre nodes in cos(theta)
    std::vector<double> theta_weights;  // GL weights (d cos theta measure)
    int n_phi = 0;

    int n_theta() const { return static_cast<int>(cos_theta.size()); }
    double phi_weight() const;  // 2*pi / n_phi
    double total_weight() const;
};

SphereGrid build_grid(int ell, int qmax = 4);

// Field values on the grid, row-major [i_theta * n_phi + j_phi].
std::vector<double> synthesize_on_grid(const HarmonicField& field, const SphereGrid& grid);

// h_{ell;q} = \int_{S^2} H_q(f_ell(x)) dx, exact up to roundoff when
// grid.qmax*grid.ell >= q*field.ell. Throws std::invalid_argument otherwise.
double sample_polyspectrum(const HarmonicField& field, int q, const SphereGrid& grid);

// Several q at once over a shared synthesis (deterministic reduction order).
std::vector<double> sample_polyspectra(const HarmonicField& field, std::span<const int> qs,
                                       const SphereGrid& grid);
std::vector<double> sample_polyspectra_from_values(std::span<const double> values,
                                                   std::span<const int> qs,
                                                   const SphereGrid& grid);

// Exact finite-ell oracle: Var(h_{ell;q}) = q! * 8 pi^2 *
// \int_0^pi P_ell(cos t)^q sin t dt, by Gauss-Legendre with enough nodes
// for the degree-q*ell integrand.
double polyspectrum_variance_exact(int ell, int q);

}  // namespace harmlab
