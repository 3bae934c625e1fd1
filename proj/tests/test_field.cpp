#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "harmlab/field.hpp"
#include "harmlab/rng.hpp"

using namespace harmlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

SpherePoint random_point(Rng& rng) {
    const double z = 2.0 * rng.uniform() - 1.0;
    return {std::acos(z), 2.0 * kPi * rng.uniform()};
}
}

TEST_CASE("sample_field determinism") {
    const auto f1 = HarmonicField::sample(2, 99);
    const auto f2 = HarmonicField::sample(2, 99);
    REQUIRE(f1.coeffs_a().size() == 5);
    for (std::size_t i = 0; i < f1.coeffs_a().size(); ++i) {
        CHECK(f1.coeffs_a()[i] == f2.coeffs_a()[i]);
    }
    const auto f3 = HarmonicField::sample(2, 100);
    bool same = true;
    for (std::size_t i = 0; i < f1.coeffs_a().size(); ++i) {
        same = same && f1.coeffs_a()[i] == f3.coeffs_a()[i];
    }
    CHECK_FALSE(same);
}

TEST_CASE("pointwise variance is one") {
    // fresh field per point so the samples of f(x)^2 are independent
    Rng rng(4242);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto field = HarmonicField::sample(10, replicate_seed(1000, 10, i));
        const double v = field.value(random_point(rng));
        acc += v * v;
    }
    CHECK(std::fabs(acc / n - 1.0) < 0.02);
}

TEST_CASE("chart consistency: coeffs_b reproduce chart-A values") {
    Rng rng(314);
    for (int ell : {5, 31, 64}) {
        const auto field = HarmonicField::sample(ell, 555 + ell);
        LegendreRow work;
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const SpherePoint x = random_point(rng);
            const double fa = field.value(x);
            const SpherePoint y = from_unit_vector(world_to_chart_b(to_unit_vector(x)));
            const double fb = synth::raw_value(field.coeffs_b(), ell, y.theta, y.phi, work);
            worst = std::max(worst, std::fabs(fa - fb));
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("zonal ell=2 jet closed form") {
    // f = P2(cos theta): only the m=0 coefficient, scaled so the synthesis
    // prefactors cancel: f = c0 * a0 * \bar P_20 = a0 * sqrt(4pi/5) * sqrt(5/4pi) P2
    std::vector<double> a(5, 0.0);
    a[2] = 1.0;
    const auto field = HarmonicField::from_coeffs(2, a);
    const SpherePoint eq{kPi / 2.0, 0.0};
    const Jet2 j = field.jet(eq);
    CHECK(j.f == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(j.g1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j.g2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j.h11 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(j.h22 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j.hess_trace() == doctest::Approx(-6.0 * j.f).epsilon(1e-12));
}

TEST_CASE("eigenfunction trace identity at random points") {
    Rng rng(8080);
    for (int ell : {3, 17, 80}) {
        const auto field = HarmonicField::sample(ell, 7000 + ell);
        const double lam = field.lambda();
        for (int i = 0; i < 100; ++i) {
            const SpherePoint x = random_point(rng);
            const Jet2 j = field.jet(x);
            const double resid = j.hess_trace() + lam * j.f;
            const double scale = std::max(std::fabs(lam * j.f), lam * 0.05);
            CHECK(std::fabs(resid) / scale < 1e-8);
        }
    }
}

TEST_CASE("gradient matches finite differences of f") {
    Rng rng(1312);
    const int ell = 24;
    const auto field = HarmonicField::sample(ell, 31337);
    const double h = 1e-4;
    for (int i = 0; i < 40; ++i) {
        SpherePoint x = random_point(rng);
        // keep clear of poles so the naive FD in chart coordinates is valid
        if (x.theta < 0.2 || x.theta > kPi - 0.2) continue;
        const Jet2 j = field.jet(x);
        const double fdt = (field.value({x.theta + h, x.phi}) - field.value({x.theta - h, x.phi})) / (2 * h);
        const double fdp = (field.value({x.theta, x.phi + h}) - field.value({x.theta, x.phi - h})) /
                           (2 * h * std::sin(x.theta));
        const double scale = std::sqrt(field.lambda());
        CHECK(std::fabs(j.g1 - fdt) / scale < 1e-5);
        CHECK(std::fabs(j.g2 - fdp) / scale < 1e-5);
    }
}

TEST_CASE("second derivatives match finite differences (both charts)") {
    const int ell = 16;
    const auto field = HarmonicField::sample(ell, 90210);
    const double h = 5e-4;
    for (const double theta : {1.2, 0.4}) {  // chart A and chart B territory
        const SpherePoint x{theta, 1.9};
        const Jet2 j = field.jet(x);
        auto F = [&](double dt, double dp) { return field.value({x.theta + dt, x.phi + dp}); };
        const double st = std::sin(theta), ct = std::cos(theta);
        const double ftt = (F(h, 0) - 2 * F(0, 0) + F(-h, 0)) / (h * h);
        const double fpp = (F(0, h) - 2 * F(0, 0) + F(0, -h)) / (h * h);
        const double ftp = (F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4 * h * h);
        const double ft = (F(h, 0) - F(-h, 0)) / (2 * h);
        const double fp = (F(0, h) - F(0, -h)) / (2 * h);
        const double h11 = ftt;
        const double h12 = ftp / st - (ct / st) * (fp / st);
        const double h22 = fpp / (st * st) + (ct / st) * ft;
        const double scale = field.lambda();
        CHECK(std::fabs(j.h11 - h11) / scale < 1e-4);
        CHECK(std::fabs(j.h12 - h12) / scale < 1e-4);
        CHECK(std::fabs(j.h22 - h22) / scale < 1e-4);
    }
}

TEST_CASE("jet at the exact pole is finite and continuous") {
    const int ell = 50;
    const auto field = HarmonicField::sample(ell, 60606);
    const Jet2 jp = field.jet({0.0, 0.0});
    CHECK(std::isfinite(jp.f));
    CHECK(std::isfinite(jp.g1));
    CHECK(std::isfinite(jp.h12));
    // value: second-order Taylor of the chart-A jet at theta = 1e-3 back to
    // the pole (step -eps along the phi = 0 meridian)
    {
        const double eps = 1e-3;
        const Jet2 jn = field.jet({eps, 0.0});
        const double f_extrap = jn.f - eps * jn.g1 + 0.5 * eps * eps * jn.h11;
        CHECK(std::fabs(jp.f - f_extrap) < 1e-4);
    }
    // gradient: first-order extrapolation at a smaller step, relative to the
    // gradient scale sqrt(lambda/2)
    {
        const double eps = 2e-4;
        const Jet2 jn = field.jet({eps, 0.0});
        const double gscale = std::sqrt(field.lambda() / 2.0);
        CHECK(std::fabs(jp.g1 - (jn.g1 - eps * jn.h11)) / gscale < 1e-4);
        CHECK(std::fabs(jp.g2 - (jn.g2 - eps * jn.h12)) / gscale < 1e-4);
        // Hessian continuity (zeroth order)
        const double hscale = field.lambda();
        CHECK(std::fabs(jp.h11 - jn.h11) / hscale < 0.05);
        CHECK(std::fabs(jp.h22 - jn.h22) / hscale < 0.05);
    }
}

TEST_CASE("negated field flips values") {
    const auto field = HarmonicField::sample(6, 12);
    const auto neg = field.negated();
    const SpherePoint x{1.0, 2.0};
    CHECK(neg.value(x) == doctest::Approx(-field.value(x)).epsilon(1e-14));
}

TEST_CASE("covariance function") {
    const SpherePoint x{1.1, 0.3};
    CHECK(covariance_fn(7, x, x) == doctest::Approx(1.0).epsilon(1e-12));
    // d = pi/2 -> P_2(0) = -0.5
    const SpherePoint a{kPi / 2.0, 0.0}, b{kPi / 2.0, kPi / 2.0};
    CHECK(covariance_fn(2, a, b) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("empirical covariance at fixed pair matches P_ell(cos d)") {
    const int ell = 10;
    const SpherePoint x{1.3, 0.7}, y{1.0, 1.4};
    const double target = covariance_fn(ell, x, y);
    const int n = 10000;
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < n; ++r) {
        const auto field = HarmonicField::sample(ell, replicate_seed(2024, ell, r));
        const double prod = field.value(x) * field.value(y);
        acc += prod;
        acc2 += prod * prod;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - target) < 3.0 * se);
}

TEST_CASE("save/load roundtrip") {
    const auto field = HarmonicField::sample(9, 777);
    const std::string path = "field_roundtrip.json";
    field.save_json(path);
    const auto loaded = HarmonicField::load_json(path);
    CHECK(loaded.ell() == 9);
    CHECK(loaded.seed() == 777);
    for (std::size_t i = 0; i < field.coeffs_a().size(); ++i) {
        CHECK(loaded.coeffs_a()[i] == field.coeffs_a()[i]);
    }
    std::remove(path.c_str());
}
