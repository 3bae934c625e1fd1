#pragma once

#include <span>

#include "harmlab/field.hpp"
#include "harmlab/polyspectra.hpp"

namespace harmlab {

// Total length of the level curve {f = u} by marching cells with linear
// interpolation on both charts; segments are owned by the chart whose side
// of |cos theta| = 1/sqrt2 their midpoint falls on. resolution_factor is the
// number of cells per great circle divided by ell (>= 8).
double level_length(const HarmonicField& field, double u, int resolution_factor = 8);

// Spherical area of the excursion set {f >= u} by grid quadrature.
double excursion_area(const HarmonicField& field, double u, const SphereGrid& grid);
double excursion_area_from_values(const SphereGrid& grid, std::span<const double> values,
                                  double u);

}  // namespace harmlab
