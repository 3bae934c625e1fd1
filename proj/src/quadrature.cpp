#include "harmlab/quadrature.hpp"

#include <cmath>

namespace harmlab {

namespace {

// 16-point Gauss-Legendre nodes/weights on (-1,1), positive half.
constexpr double kX16[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kW16[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        s += kW16[i] * (f(c + h * kX16[i]) + f(c - h * kX16[i]));
    }
    return s * h;
}

}  // namespace

double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels < 1) panels = 1;
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        s += gauss16(f, a + i * h, a + (i + 1) * h);
    }
    return s;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int min_panels, int max_panels) {
    int n = min_panels < 1 ? 1 : min_panels;
    double prev = integrate_panels(f, a, b, n);
    double diff = 0.0, cur = prev;
    while (n < max_panels) {
        n *= 2;
        cur = integrate_panels(f, a, b, n);
        const double scale = std::max(std::fabs(cur), std::fabs(prev));
        diff = std::fabs(cur - prev);
        if (diff <= std::max(tol * scale, tol)) return cur;
        prev = cur;
    }
    const double achieved = diff / std::max(std::fabs(cur), 1.0);
    throw QuadratureError("integrate_adaptive: did not converge", achieved);
}

}  // namespace harmlab
