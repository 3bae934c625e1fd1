#include "harmlab/polyspectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harmlab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

double hermite(int q, double u) {
    if (q < 0) throw std::domain_error("hermite: q must be >= 0");
    if (q == 0) return 1.0;
    double hm1 = 1.0, h = u;
    for (int k = 1; k < q; ++k) {
        const double next = u * h - k * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

double SphereGrid::phi_weight() const { return 2.0 * kPi / n_phi; }

double SphereGrid::total_weight() const {
    double s = 0.0;
    for (double w : theta_weights) s += w;
    return s * 2.0 * kPi;
}

SphereGrid build_grid(int ell, int qmax) {
    if (ell < 1 || qmax < 1) throw std::domain_error("build_grid: need ell >= 1, qmax >= 1");
    SphereGrid g;
    g.ell = ell;
    g.qmax = qmax;
    const int deg = qmax * ell;
    const int nth = deg / 2 + 1;
    g.n_phi = deg + 1;
    const QuadratureRule1D rule = gauss_legendre(nth);
    g.cos_theta = rule.nodes;
    g.theta_weights = rule.weights;
    return g;
}

std::vector<double> synthesize_on_grid(const HarmonicField& field, const SphereGrid& grid) {
    const int nth = grid.n_theta();
    const int nph = grid.n_phi;
    std::vector<double> values(static_cast<std::size_t>(nth) * nph);
    std::vector<double> phis(nph);
    for (int j = 0; j < nph; ++j) phis[j] = 2.0 * kPi * j / nph;
    LegendreRow work;
    for (int i = 0; i < nth; ++i) {
        const double theta = std::acos(grid.cos_theta[i]);
        synth::eval_latitude(field.coeffs_a(), field.ell(), theta, phis, work,
                             std::span<double>(values.data() + static_cast<std::size_t>(i) * nph, nph),
                             {}, {});
    }
    return values;
}

std::vector<double> sample_polyspectra_from_values(std::span<const double> values,
                                                   std::span<const int> qs,
                                                   const SphereGrid& grid) {
    const int nth = grid.n_theta();
    const int nph = grid.n_phi;
    int qmax = 0;
    for (int q : qs) qmax = std::max(qmax, q);
    std::vector<double> h(qmax + 1);
    std::vector<double> out(qs.size(), 0.0);
    std::vector<double> lat_acc(qs.size());
    // reduce latitude by latitude in fixed order for bit-reproducibility
    for (int i = 0; i < nth; ++i) {
        std::fill(lat_acc.begin(), lat_acc.end(), 0.0);
        const double* row = values.data() + static_cast<std::size_t>(i) * nph;
        for (int j = 0; j < nph; ++j) {
            const double u = row[j];
            h[0] = 1.0;
            if (qmax >= 1) h[1] = u;
            for (int k = 1; k < qmax; ++k) h[k + 1] = u * h[k] - k * h[k - 1];
            for (std::size_t k = 0; k < qs.size(); ++k) lat_acc[k] += h[qs[k]];
        }
        for (std::size_t k = 0; k < qs.size(); ++k) {
            out[k] += grid.theta_weights[i] * lat_acc[k];
        }
    }
    for (std::size_t k = 0; k < qs.size(); ++k) out[k] *= grid.phi_weight();
    return out;
}

std::vector<double> sample_polyspectra(const HarmonicField& field, std::span<const int> qs,
                                       const SphereGrid& grid) {
    for (int q : qs) {
        if (q < 0) throw std::domain_error("sample_polyspectra: q must be >= 0");
        if (static_cast<long long>(q) * field.ell() >
            static_cast<long long>(grid.qmax) * grid.ell) {
            throw std::invalid_argument(
                "sample_polyspectra: grid band limit too small for requested q");
        }
    }
    const std::vector<double> values = synthesize_on_grid(field, grid);
    return sample_polyspectra_from_values(values, qs, grid);
}

double sample_polyspectrum(const HarmonicField& field, int q, const SphereGrid& grid) {
    const int qs[1] = {q};
    return sample_polyspectra(field, qs, grid)[0];
}

double polyspectrum_variance_exact(int ell, int q) {
    if (ell < 1 || q < 1) throw std::domain_error("polyspectrum_variance_exact: need ell, q >= 1");
    const int n = (q * ell) / 2 + 1;
    const QuadratureRule1D rule = gauss_legendre(n);
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = legendre_eval(ell, rule.nodes[i]).p;
        integral += rule.weights[i] * std::pow(p, q);
    }
    double qfact = 1.0;
    for (int k = 2; k <= q; ++k) qfact *= k;
    return qfact * 8.0 * kPi * kPi * integral;
}

}  // namespace harmlab
