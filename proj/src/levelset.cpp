#include "harmlab/levelset.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace harmlab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

constexpr double kBandLo = kPi / 4.0 - 0.10;
constexpr double kBandHi = 3.0 * kPi / 4.0 + 0.10;

struct ChartPoint {
    double theta, phi;
};

Vec3 chart_to_world(bool chart_b, double theta, double phi) {
    const Vec3 v = to_unit_vector({theta, phi});
    return chart_b ? chart_b_to_world(v) : v;
}

// one chart's contribution: marching squares over its comfortable band,
// keeping segments whose midpoint the chart owns
double march_chart(const HarmonicField& field, bool chart_b, double u, int resolution) {
    const int ell = field.ell();
    const auto& coeffs = chart_b ? field.coeffs_b() : field.coeffs_a();

    const double cell = 2.0 * kPi / resolution;
    const int np = resolution;
    const int nt = static_cast<int>(std::ceil((kBandHi - kBandLo) / cell));
    const double dth = (kBandHi - kBandLo) / nt;
    const double dph = 2.0 * kPi / np;

    std::vector<double> phis(np);
    for (int j = 0; j < np; ++j) phis[j] = j * dph;

    std::vector<double> vals(static_cast<std::size_t>(nt + 1) * np);
    LegendreRow work;
    for (int i = 0; i <= nt; ++i) {
        synth::eval_latitude(coeffs, ell, kBandLo + i * dth, phis, work,
                             std::span<double>(vals.data() + static_cast<std::size_t>(i) * np, np),
                             {}, {});
    }

    double length = 0.0;
    // edge crossing positions by linear interpolation; cells indexed by
    // lower-left corner
    for (int i = 0; i < nt; ++i) {
        const double th0 = kBandLo + i * dth;
        const double th1 = th0 + dth;
        for (int j = 0; j < np; ++j) {
            const int jn = (j + 1) % np;
            const double ph0 = j * dph;
            const double ph1 = ph0 + dph;  // keep unwrapped for interpolation
            const double f00 = vals[static_cast<std::size_t>(i) * np + j] - u;
            const double f01 = vals[static_cast<std::size_t>(i) * np + jn] - u;
            const double f10 = vals[static_cast<std::size_t>(i + 1) * np + j] - u;
            const double f11 = vals[static_cast<std::size_t>(i + 1) * np + jn] - u;

            const int c = (f00 > 0 ? 1 : 0) | (f01 > 0 ? 2 : 0) | (f10 > 0 ? 4 : 0) |
                          (f11 > 0 ? 8 : 0);
            if (c == 0 || c == 15) continue;

            // interpolated crossings on the four edges (theta, phi)
            ChartPoint e_bottom{th0, ph0 + dph * f00 / (f00 - f01)};  // between f00,f01
            ChartPoint e_top{th1, ph0 + dph * f10 / (f10 - f11)};
            ChartPoint e_left{th0 + dth * f00 / (f00 - f10), ph0};
            ChartPoint e_right{th0 + dth * f01 / (f01 - f11), ph1};

            ChartPoint a{0, 0}, b{0, 0}, a2{0, 0}, b2{0, 0};
            bool two = false;
            switch (c) {
                case 1: case 14: a = e_bottom; b = e_left; break;
                case 2: case 13: a = e_bottom; b = e_right; break;
                case 3: case 12: a = e_left; b = e_right; break;
                case 4: case 11: a = e_left; b = e_top; break;
                case 5: case 10: a = e_bottom; b = e_top; break;
                case 6: case 9: {
                    // ambiguous: resolve connectivity with the cell-centre sample
                    const double fc = 0.25 * (f00 + f01 + f10 + f11);
                    two = true;
                    if ((c == 6) == (fc > 0)) {
                        a = e_bottom; b = e_left;
                        a2 = e_top; b2 = e_right;
                    } else {
                        a = e_bottom; b = e_right;
                        a2 = e_left; b2 = e_top;
                    }
                    break;
                }
                case 7: case 8: a = e_right; b = e_top; break;
                default: continue;
            }

            auto add_segment = [&](const ChartPoint& p, const ChartPoint& q) {
                const Vec3 wp = chart_to_world(chart_b, p.theta, p.phi);
                const Vec3 wq = chart_to_world(chart_b, q.theta, q.phi);
                const double zmid = 0.5 * (wp.z + wq.z);
                const bool owned = chart_b ? (std::fabs(zmid) > kInvSqrt2)
                                           : (std::fabs(zmid) <= kInvSqrt2);
                if (owned) length += geodesic_distance(wp, wq);
            };
            add_segment(a, b);
            if (two) add_segment(a2, b2);
        }
    }
    return length;
}

}  // namespace

double level_length(const HarmonicField& field, double u, int resolution_factor) {
    if (resolution_factor < 8)
        throw std::domain_error("level_length: resolution_factor must be >= 8");
    const int resolution = resolution_factor * field.ell();
    return march_chart(field, false, u, resolution) + march_chart(field, true, u, resolution);
}

double excursion_area_from_values(const SphereGrid& grid, std::span<const double> values,
                                  double u) {
    const int nth = grid.n_theta();
    const int nph = grid.n_phi;
    double area = 0.0;
    for (int i = 0; i < nth; ++i) {
        int count = 0;
        const double* row = values.data() + static_cast<std::size_t>(i) * nph;
        for (int j = 0; j < nph; ++j) count += (row[j] >= u) ? 1 : 0;
        area += grid.theta_weights[i] * count;
    }
    return area * grid.phi_weight();
}

double excursion_area(const HarmonicField& field, double u, const SphereGrid& grid) {
    const std::vector<double> values = synthesize_on_grid(field, grid);
    return excursion_area_from_values(grid, values, u);
}

}  // namespace harmlab
