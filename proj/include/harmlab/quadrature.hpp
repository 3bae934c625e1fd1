#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace harmlab {

struct QuadratureError : std::runtime_error {
    double achieved_tolerance;
    QuadratureError(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tolerance(achieved) {}
};

// Composite 16-point Gauss-Legendre over [a,b] with a fixed panel count.
double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels);

// Panel-doubling Gauss quadrature: doubles the panel count until two
// successive composite values agree to tol (relative to scale, absolute
// below it). min_panels lets callers force resolution of oscillatory
// integrands (e.g. >= ell panels for degree-ell Legendre products).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int min_panels = 8, int max_panels = 1 << 18);

}  // namespace harmlab
