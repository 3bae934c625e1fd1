#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "harmlab/legendre.hpp"
#include "harmlab/sphere.hpp"

namespace harmlab {

// Value, covariant gradient and covariant Hessian of a field at a point,
// expressed in the orthonormal frame (e_theta, e_phi):
//   g1 = d_theta f, g2 = (1/sin theta) d_phi f,
//   h11 = d_theta^2 f,
//   h12 = (1/sin theta) d_theta d_phi f - cot(theta) g2,
//   h22 = (1/sin^2 theta) d_phi^2 f + cot(theta) g1.
struct Jet2 {
    double f;
    double g1, g2;
    double h11, h12, h22;

    double hess_det() const { return h11 * h22 - h12 * h12; }
    double hess_trace() const { return h11 + h22; }
};

// One sampled Gaussian eigenfunction of degree ell, unit pointwise variance.
// Coefficients are i.i.d. N(0,1) in the real basis, stored m = -ell..ell as
// [sin(ell phi), ..., sin(phi), const, cos(phi), ..., cos(ell phi)] order,
// i.e. index m+ell. Chart-B coefficients (same field in the rotated chart)
// are obtained by exact quadrature projection and cached lazily.
class HarmonicField {
  public:
    static HarmonicField sample(int ell, std::uint64_t seed);
    static HarmonicField from_coeffs(int ell, std::vector<double> coeffs_a,
                                     std::uint64_t seed = 0);

    int ell() const { return ell_; }
    std::uint64_t seed() const { return seed_; }
    double lambda() const { return static_cast<double>(ell_) * (ell_ + 1.0); }

    const std::vector<double>& coeffs_a() const { return a_; }
    const std::vector<double>& coeffs_b() const;  // computed on first use

    double value(const SpherePoint& x) const;
    // Full jet with chart dispatch: chart A for |cos theta| <= 1/sqrt(2),
    // else evaluated in chart B and rotated back through the frame change.
    Jet2 jet(const SpherePoint& x) const;

    HarmonicField negated() const;

    // flat JSON record {ell, seed, coeffs_a}; coeffs_b recomputed on load
    void save_json(const std::string& path) const;
    static HarmonicField load_json(const std::string& path);

  private:
    HarmonicField(int ell, std::uint64_t seed, std::vector<double> a);

    struct ChartBCache {
        std::once_flag once;
        std::vector<double> b;
    };

    int ell_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> a_;
    mutable std::shared_ptr<ChartBCache> bcache_;
    void project_chart_b() const;
};

// E[f_ell(x) f_ell(y)] = P_ell(cos d(x,y))
double covariance_fn(int ell, const SpherePoint& x, const SpherePoint& y);

namespace synth {

// Raw (unrotated) jet of a coefficient vector at chart coordinates (theta,
// phi), using a caller-provided Legendre row workspace.
Jet2 raw_jet(std::span<const double> coeffs, int ell, double theta, double phi,
             LegendreRow& work);

double raw_value(std::span<const double> coeffs, int ell, double theta, double phi,
                 LegendreRow& work);

// Batched evaluation along one latitude ring: values (and optionally first
// gradient components) for all phis. Used by grid scans.
void eval_latitude(std::span<const double> coeffs, int ell, double theta,
                   std::span<const double> phis, LegendreRow& work,
                   std::span<double> out_f, std::span<double> out_g1,
                   std::span<double> out_g2);

}  // namespace synth

}  // namespace harmlab
