#include "harmlab/field.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "harmlab/rng.hpp"
#include "json.hpp"

namespace harmlab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr std::uint64_t kFieldStreamTag = 0x4649454C44ULL;

double synth_scale(int ell) { return std::sqrt(4.0 * kPi / (2.0 * ell + 1.0)); }
}  // namespace

namespace synth {

namespace {

// Accumulate the m-sums S[k] used by value/jet evaluation:
//   S0 = a0 v0 + sqrt2 sum A_m v_m          (value)
//   S1 = a0 v0' + sqrt2 sum A_m v_m'        (d_theta)
//   S2 = sqrt2 sum m B_m v_m                (d_phi)
//   S3 = a0 v0'' + sqrt2 sum A_m v_m''      (d_theta^2)
//   S4 = sqrt2 sum m B_m v_m'               (d_theta d_phi)
//   S5 = sqrt2 sum m^2 A_m v_m              (-d_phi^2)
// with A_m = a_{+m} cos(m phi) + a_{-m} sin(m phi),
//      B_m = -a_{+m} sin(m phi) + a_{-m} cos(m phi).
struct Sums {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0;
};

Sums accumulate(std::span<const double> coeffs, int ell, double phi,
                const LegendreRow& row, bool want_value, bool want_grad,
                bool second_order) {
    const double sqrt2 = std::sqrt(2.0);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double a0 = coeffs[ell];
    Sums s;
    if (want_value) s.s0 = a0 * row.val[0];
    if (want_grad) {
        s.s1 = a0 * row.dth[0];
        if (second_order) s.s3 = a0 * row.ddth[0];
    }
    double cm = 1.0, sm = 0.0;  // cos(m phi), sin(m phi) at m=0
    for (int m = 1; m <= ell; ++m) {
        const double c_next = cm * cp - sm * sp;
        const double s_next = sm * cp + cm * sp;
        cm = c_next;
        sm = s_next;
        const double ac = coeffs[ell + m];
        const double as = coeffs[ell - m];
        const double A = sqrt2 * (ac * cm + as * sm);
        if (want_value) s.s0 += A * row.val[m];
        if (want_grad) {
            const double B = sqrt2 * (-ac * sm + as * cm);
            s.s1 += A * row.dth[m];
            s.s2 += m * B * row.val[m];
            if (second_order) {
                s.s3 += A * row.ddth[m];
                s.s4 += m * B * row.dth[m];
                s.s5 += static_cast<double>(m) * m * A * row.val[m];
            }
        }
    }
    return s;
}

}  // namespace

double raw_value(std::span<const double> coeffs, int ell, double theta, double phi,
                 LegendreRow& work) {
    assoc_legendre_row(ell, theta, work, /*derivatives=*/false);
    const Sums s = accumulate(coeffs, ell, phi, work, true, false, false);
    return synth_scale(ell) * s.s0;
}

Jet2 raw_jet(std::span<const double> coeffs, int ell, double theta, double phi,
             LegendreRow& work) {
    assoc_legendre_row(ell, theta, work, /*derivatives=*/true);
    const Sums s = accumulate(coeffs, ell, phi, work, true, true, true);
    const double c0 = synth_scale(ell);
    const double st = std::sin(theta);
    const double cot = std::cos(theta) / st;

    Jet2 j;
    j.f = c0 * s.s0;
    j.g1 = c0 * s.s1;
    j.g2 = c0 * s.s2 / st;
    j.h11 = c0 * s.s3;
    const double d12 = c0 * s.s4 / st;          // (1/sin) d_theta d_phi
    const double d22 = -c0 * s.s5 / (st * st);  // (1/sin^2) d_phi^2
    j.h12 = d12 - cot * j.g2;
    j.h22 = d22 + cot * j.g1;
    return j;
}

void eval_latitude(std::span<const double> coeffs, int ell, double theta,
                   std::span<const double> phis, LegendreRow& work,
                   std::span<double> out_f, std::span<double> out_g1,
                   std::span<double> out_g2) {
    const bool want_grad = !out_g1.empty();
    const bool want_value = !out_f.empty();
    assoc_legendre_row(ell, theta, work, want_grad);
    const double c0 = synth_scale(ell);
    const double st = std::sin(theta);
    for (std::size_t i = 0; i < phis.size(); ++i) {
        const Sums s = accumulate(coeffs, ell, phis[i], work, want_value, want_grad, false);
        if (want_value) out_f[i] = c0 * s.s0;
        if (want_grad) {
            out_g1[i] = c0 * s.s1;
            out_g2[i] = c0 * s.s2 / st;
        }
    }
}

}  // namespace synth

HarmonicField::HarmonicField(int ell, std::uint64_t seed, std::vector<double> a)
    : ell_(ell), seed_(seed), a_(std::move(a)), bcache_(std::make_shared<ChartBCache>()) {}

HarmonicField HarmonicField::sample(int ell, std::uint64_t seed) {
    if (ell < 1) throw std::domain_error("HarmonicField::sample: ell must be >= 1");
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(ell), kFieldStreamTag);
    std::vector<double> a(2 * ell + 1);
    for (auto& c : a) c = rng.gaussian();
    return HarmonicField(ell, seed, std::move(a));
}

HarmonicField HarmonicField::from_coeffs(int ell, std::vector<double> coeffs_a,
                                         std::uint64_t seed) {
    if (ell < 1) throw std::domain_error("HarmonicField::from_coeffs: ell must be >= 1");
    if (coeffs_a.size() != static_cast<std::size_t>(2 * ell + 1))
        throw std::invalid_argument("HarmonicField::from_coeffs: need 2*ell+1 coefficients");
    return HarmonicField(ell, seed, std::move(coeffs_a));
}

HarmonicField HarmonicField::negated() const {
    std::vector<double> na(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) na[i] = -a_[i];
    return HarmonicField(ell_, seed_, std::move(na));
}

double HarmonicField::value(const SpherePoint& x) const {
    thread_local LegendreRow work;
    return synth::raw_value(a_, ell_, x.theta, x.phi, work);
}

const std::vector<double>& HarmonicField::coeffs_b() const {
    std::call_once(bcache_->once, [this] { project_chart_b(); });
    return bcache_->b;
}

void HarmonicField::project_chart_b() const {
    // Exact forward projection: the rotated field is still degree ell, so a
    // Gauss-Legendre x uniform-phi grid sized for degree-2*ell integrands
    // recovers its coefficients exactly (up to roundoff).
    const int ell = ell_;
    const int nth = ell + 1;
    const int nph = 2 * ell + 1;
    const QuadratureRule1D rule = gauss_legendre(nth);
    const double c0 = synth_scale(ell);
    std::vector<double> b(2 * ell + 1, 0.0);
    LegendreRow row_b;    // basis row in chart B
    LegendreRow work;     // workspace for chart-A evaluation
    std::vector<double> g(nph);
    std::vector<double> cm(nph), sm(nph), c1(nph), s1(nph);
    const double dphi = 2.0 * kPi / nph;
    for (int j = 0; j < nph; ++j) {
        c1[j] = std::cos(j * dphi);
        s1[j] = std::sin(j * dphi);
    }

    for (int i = 0; i < nth; ++i) {
        const double xb = rule.nodes[i];
        const double thb = std::acos(xb);
        const double sb = std::sin(thb);
        for (int j = 0; j < nph; ++j) {
            const double phb = j * dphi;
            const Vec3 bpt{sb * std::cos(phb), sb * std::sin(phb), xb};
            const SpherePoint w = from_unit_vector(chart_b_to_world(bpt));
            g[j] = synth::raw_value(a_, ell, w.theta, w.phi, work);
        }
        detail::row_upward_l(ell, xb, row_b.val);
        const double wq = rule.weights[i] * dphi / c0;
        // m = 0
        {
            double acc = 0.0;
            for (int j = 0; j < nph; ++j) acc += g[j];
            b[ell] += wq * row_b.val[0] * acc;
        }
        for (int j = 0; j < nph; ++j) {
            cm[j] = 1.0;
            sm[j] = 0.0;
        }
        for (int m = 1; m <= ell; ++m) {
            double acc_c = 0.0, acc_s = 0.0;
            for (int j = 0; j < nph; ++j) {
                const double c_next = cm[j] * c1[j] - sm[j] * s1[j];
                const double s_next = sm[j] * c1[j] + cm[j] * s1[j];
                cm[j] = c_next;
                sm[j] = s_next;
                acc_c += g[j] * cm[j];
                acc_s += g[j] * sm[j];
            }
            const double f = wq * std::sqrt(2.0) * row_b.val[m];
            b[ell + m] += f * acc_c;
            b[ell - m] += f * acc_s;
        }
    }
    bcache_->b = std::move(b);
}

Jet2 HarmonicField::jet(const SpherePoint& x) const {
    thread_local LegendreRow work;
    const double ct = std::cos(x.theta);
    if (std::fabs(ct) <= kInvSqrt2) {
        return synth::raw_jet(a_, ell_, x.theta, x.phi, work);
    }
    const Vec3 w = to_unit_vector(x);
    const SpherePoint y = from_unit_vector(world_to_chart_b(w));
    const Jet2 jb = synth::raw_jet(coeffs_b(), ell_, y.theta, y.phi, work);

    const TangentFrame fa = tangent_frame(x);
    const TangentFrame fb = tangent_frame(y);
    const Vec3 e1 = chart_b_to_world(fb.e_theta);
    const Vec3 e2 = chart_b_to_world(fb.e_phi);
    const double q11 = fa.e_theta.dot(e1), q12 = fa.e_theta.dot(e2);
    const double q21 = fa.e_phi.dot(e1), q22 = fa.e_phi.dot(e2);

    Jet2 j;
    j.f = jb.f;
    j.g1 = q11 * jb.g1 + q12 * jb.g2;
    j.g2 = q21 * jb.g1 + q22 * jb.g2;
    // H_A = Q H_B Q^T
    const double t11 = q11 * jb.h11 + q12 * jb.h12;
    const double t12 = q11 * jb.h12 + q12 * jb.h22;
    const double t21 = q21 * jb.h11 + q22 * jb.h12;
    const double t22 = q21 * jb.h12 + q22 * jb.h22;
    j.h11 = t11 * q11 + t12 * q12;
    j.h12 = t11 * q21 + t12 * q22;
    j.h22 = t21 * q21 + t22 * q22;
    return j;
}

void HarmonicField::save_json(const std::string& path) const {
    nlohmann::json j;
    j["ell"] = ell_;
    j["seed"] = seed_;
    j["coeffs_a"] = a_;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("HarmonicField::save_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

HarmonicField HarmonicField::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("HarmonicField::load_json: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_coeffs(j.at("ell").get<int>(),
                       j.at("coeffs_a").get<std::vector<double>>(),
                       j.at("seed").get<std::uint64_t>());
}

double covariance_fn(int ell, const SpherePoint& x, const SpherePoint& y) {
    const double c = std::cos(geodesic_distance(x, y));
    return legendre_eval(ell, std::min(1.0, std::max(-1.0, c))).p;
}

}  // namespace harmlab
