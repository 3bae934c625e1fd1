#include "harmlab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace harmlab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// comfortable band per chart, with margin past the ownership seam
constexpr double kBandLo = kPi / 4.0 - 0.13;
constexpr double kBandHi = 3.0 * kPi / 4.0 + 0.13;

struct RawCritical {
    Vec3 pos;  // world coordinates
    double value;
    double residual;
    double det;
    double trace;
};

double world_abs_z(bool chart_b, double theta, double phi) {
    if (!chart_b) return std::fabs(std::cos(theta));
    return std::fabs(std::sin(theta) * std::cos(phi));
}

Vec3 to_world(bool chart_b, const SpherePoint& p) {
    const Vec3 v = to_unit_vector(p);
    return chart_b ? chart_b_to_world(v) : v;
}

// Newton refinement in one chart's coordinates; the covariant Hessian is the
// exact Jacobian of the gradient at critical points. Returns true on
// convergence inside the band.
bool refine(std::span<const double> coeffs, int ell, double lam, SpherePoint& p,
            Jet2& jet, const CritOptions& opt, LegendreRow& work) {
    const double tol = opt.newton_tol * lam;
    const double step_cap = kPi / ell;  // half a wavelength
    for (int it = 0; it < opt.max_newton; ++it) {
        if (p.theta < kBandLo - 0.05 || p.theta > kBandHi + 0.05) return false;
        jet = synth::raw_jet(coeffs, ell, p.theta, p.phi, work);
        if (std::hypot(jet.g1, jet.g2) <= tol) return true;
        const double det = jet.hess_det();
        if (std::fabs(det) < 1e-14 * lam * lam) return false;
        double d1 = (-jet.g1 * jet.h22 + jet.g2 * jet.h12) / det;
        double d2 = (-jet.g2 * jet.h11 + jet.g1 * jet.h12) / det;
        const double dn = std::hypot(d1, d2);
        if (dn > step_cap) {
            d1 *= step_cap / dn;
            d2 *= step_cap / dn;
        }
        p.theta += d1;
        p.phi += d2 / std::sin(p.theta);
    }
    jet = synth::raw_jet(coeffs, ell, p.theta, p.phi, work);
    return std::hypot(jet.g1, jet.g2) <= tol;
}

void scan_chart(const HarmonicField& field, bool chart_b, const CritOptions& opt,
                std::vector<RawCritical>& out) {
    const int ell = field.ell();
    const double lam = field.lambda();
    const auto& coeffs = chart_b ? field.coeffs_b() : field.coeffs_a();

    // resolution matching a (kappa ell x 2 kappa ell) full-sphere grid,
    // restricted to this chart's band
    const int nt = static_cast<int>(std::ceil((kBandHi - kBandLo) * opt.grid_factor * ell / kPi));
    const int np = 2 * opt.grid_factor * ell;  // cells in phi
    const double dth = (kBandHi - kBandLo) / nt;
    const double dph = 2.0 * kPi / np;

    std::vector<double> phis(np);
    for (int j = 0; j < np; ++j) phis[j] = j * dph;

    std::vector<double> g1(static_cast<std::size_t>(nt + 1) * np);
    std::vector<double> g2(static_cast<std::size_t>(nt + 1) * np);
    LegendreRow work;
    for (int i = 0; i <= nt; ++i) {
        const double theta = kBandLo + i * dth;
        synth::eval_latitude(coeffs, ell, theta, phis, work, {},
                             std::span<double>(g1.data() + static_cast<std::size_t>(i) * np, np),
                             std::span<double>(g2.data() + static_cast<std::size_t>(i) * np, np));
    }

    const double seed_thresh = opt.seed_grad_factor * dth * lam;
    const double ownership_overlap = 2.0 * std::max(dth, dph);

    // per-cell sign-variation flags for each gradient component
    auto varies = [np](const std::vector<double>& g, int i, int j) {
        const int jn = (j + 1) % np;
        const double a = g[static_cast<std::size_t>(i) * np + j];
        const double b = g[static_cast<std::size_t>(i) * np + jn];
        const double c = g[static_cast<std::size_t>(i + 1) * np + j];
        const double d = g[static_cast<std::size_t>(i + 1) * np + jn];
        return (a > 0) != (b > 0) || (a > 0) != (c > 0) || (a > 0) != (d > 0);
    };
    std::vector<unsigned char> v1(static_cast<std::size_t>(nt) * np), v2(v1.size());
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            v1[static_cast<std::size_t>(i) * np + j] = varies(g1, i, j) ? 1 : 0;
            v2[static_cast<std::size_t>(i) * np + j] = varies(g2, i, j) ? 1 : 0;
        }
    }
    // the two zero curves can cross near a cell corner without either cell
    // seeing both components flip; a 3x3 block test around each cell covers
    // those configurations
    auto block_or = [&](const std::vector<unsigned char>& v, int i, int j) {
        for (int di = -1; di <= 1; ++di) {
            const int ii = i + di;
            if (ii < 0 || ii >= nt) continue;
            for (int dj = -1; dj <= 1; ++dj) {
                const int jj = (j + dj + np) % np;
                if (v[static_cast<std::size_t>(ii) * np + jj]) return true;
            }
        }
        return false;
    };

    for (int i = 0; i < nt; ++i) {
        const double theta_c = kBandLo + (i + 0.5) * dth;
        for (int j = 0; j < np; ++j) {
            const double phi_c = (j + 0.5) * dph;
            const double absz = world_abs_z(chart_b, theta_c, phi_c);
            // overlapping ownership around the seam; duplicates merge later
            if (!chart_b && absz > kInvSqrt2 + ownership_overlap) continue;
            if (chart_b && absz < kInvSqrt2 - ownership_overlap) continue;

            const std::size_t cell = static_cast<std::size_t>(i) * np + j;
            bool seed = (v1[cell] && block_or(v2, i, j)) || (v2[cell] && block_or(v1, i, j));
            if (!seed && seed_thresh > 0.0) {
                const int jn = (j + 1) % np;
                const std::size_t c00 = cell;
                const std::size_t c01 = static_cast<std::size_t>(i) * np + jn;
                const std::size_t c10 = static_cast<std::size_t>(i + 1) * np + j;
                const std::size_t c11 = static_cast<std::size_t>(i + 1) * np + jn;
                const double m00 = std::hypot(g1[c00], g2[c00]), m01 = std::hypot(g1[c01], g2[c01]);
                const double m10 = std::hypot(g1[c10], g2[c10]), m11 = std::hypot(g1[c11], g2[c11]);
                seed = std::min(std::min(m00, m01), std::min(m10, m11)) < seed_thresh;
            }
            if (!seed) continue;

            SpherePoint p{theta_c, phi_c};
            Jet2 jet;
            if (!refine(coeffs, ell, lam, p, jet, opt, work)) continue;
            RawCritical rc;
            rc.pos = to_world(chart_b, p);
            rc.value = jet.f;
            rc.residual = std::hypot(jet.g1, jet.g2);
            rc.det = jet.hess_det();
            rc.trace = jet.hess_trace();
            out.push_back(rc);
        }
    }
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const HarmonicField& field,
                                                const CritOptions& opt) {
    const int ell = field.ell();
    if (opt.grid_factor * ell < 16)
        throw std::domain_error("find_critical_points: grid_factor * ell must be >= 16");
    const double lam = field.lambda();

    std::vector<RawCritical> raw;
    raw.reserve(static_cast<std::size_t>(4.0 * lam));
    scan_chart(field, false, opt, raw);
    scan_chart(field, true, opt, raw);

    // deduplicate within geodesic radius dedup_radius / ell, keeping the
    // lowest residual per cluster; deterministic pass over points sorted by
    // world z with a sliding window
    const double rad = opt.dedup_radius / ell;
    const double chord2 = std::pow(2.0 * std::sin(rad / 2.0), 2);
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&raw](std::size_t a, std::size_t b) {
        if (raw[a].pos.z != raw[b].pos.z) return raw[a].pos.z < raw[b].pos.z;
        if (raw[a].pos.x != raw[b].pos.x) return raw[a].pos.x < raw[b].pos.x;
        if (raw[a].pos.y != raw[b].pos.y) return raw[a].pos.y < raw[b].pos.y;
        return raw[a].residual < raw[b].residual;
    });

    std::vector<std::size_t> kept;  // indices into raw, ascending in z
    kept.reserve(order.size());
    for (std::size_t oi : order) {
        const RawCritical& cand = raw[oi];
        bool merged = false;
        for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
            const RawCritical& acc = raw[*it];
            if (cand.pos.z - acc.pos.z > rad) break;
            const Vec3 d = cand.pos - acc.pos;
            if (d.dot(d) <= chord2) {
                if (cand.residual < acc.residual) *it = oi;
                merged = true;
                break;
            }
        }
        if (!merged) kept.push_back(oi);
    }

    std::vector<CriticalPoint> points;
    points.reserve(kept.size());
    int n_min = 0, n_sad = 0, n_max = 0;
    for (std::size_t idx : kept) {
        const RawCritical& rc = raw[idx];
        if (std::fabs(rc.det) < opt.degenerate_tol * lam * lam) {
            throw DegenerateCritical(
                "find_critical_points: near-singular Hessian at a converged point");
        }
        CriticalPoint cp;
        cp.point = from_unit_vector(rc.pos);
        cp.value = rc.value;
        cp.residual = rc.residual;
        cp.hess_det = rc.det;
        if (rc.det < 0.0) {
            cp.kind = CritKind::saddle;
            ++n_sad;
        } else if (rc.trace < 0.0) {
            cp.kind = CritKind::maximum;
            ++n_max;
        } else {
            cp.kind = CritKind::minimum;
            ++n_min;
        }
        points.push_back(cp);
    }

    if (n_min - n_sad + n_max != 2) {
        throw IncompleteMorse("find_critical_points: Morse relation violated (" +
                              std::to_string(n_min) + " min, " + std::to_string(n_sad) +
                              " saddle, " + std::to_string(n_max) + " max)");
    }

    std::sort(points.begin(), points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.point.theta != b.point.theta) return a.point.theta < b.point.theta;
        return a.point.phi < b.point.phi;
    });
    return points;
}

int count_in_interval(const std::vector<CriticalPoint>& points, const Interval& I) {
    int n = 0;
    for (const auto& p : points) n += I.contains(p.value) ? 1 : 0;
    return n;
}

CritSummary summarize(const std::vector<CriticalPoint>& points,
                      const std::vector<Interval>& intervals) {
    CritSummary s;
    for (const auto& p : points) {
        switch (p.kind) {
            case CritKind::minimum: ++s.n_min; break;
            case CritKind::saddle: ++s.n_saddle; break;
            case CritKind::maximum: ++s.n_max; break;
        }
    }
    s.interval_counts.reserve(intervals.size());
    for (const auto& I : intervals) s.interval_counts.push_back(count_in_interval(points, I));
    return s;
}

int euler_characteristic(const std::vector<CriticalPoint>& points, double u) {
    int chi = 0;
    for (const auto& p : points) {
        if (p.value < u) continue;
        chi += (p.kind == CritKind::saddle) ? -1 : 1;
    }
    return chi;
}

}  // namespace harmlab
