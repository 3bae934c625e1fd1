// Python bindings for the main operations: field sampling and evaluation,
// closed-form covariances, polyspectra, critical point geometry and the
// theory oracles.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "harmlab/critical.hpp"
#include "harmlab/experiment.hpp"
#include "harmlab/field.hpp"
#include "harmlab/legendre.hpp"
#include "harmlab/levelset.hpp"
#include "harmlab/polyspectra.hpp"
#include "harmlab/sigma.hpp"
#include "harmlab/theory.hpp"

namespace py = pybind11;
using namespace harmlab;

namespace {

py::array_t<double> mat5_to_numpy(const Mat5& m) {
    py::array_t<double> out({5, 5});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r(i, j) = m[i][j];
    return out;
}

Mat3 numpy_to_mat3(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2 || a.shape(0) != 3 || a.shape(1) != 3)
        throw std::invalid_argument("expected a 3x3 array");
    Mat3 m{};
    auto r = a.unchecked<2>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = r(i, j);
    return m;
}

}  // namespace

PYBIND11_MODULE(_harmlab, m) {
    m.doc() = "Random spherical harmonics laboratory";

    py::class_<SpherePoint>(m, "SpherePoint")
        .def(py::init<double, double>(), py::arg("theta"), py::arg("phi"))
        .def_readwrite("theta", &SpherePoint::theta)
        .def_readwrite("phi", &SpherePoint::phi);

    py::class_<Jet2>(m, "Jet2")
        .def_readonly("f", &Jet2::f)
        .def_readonly("g1", &Jet2::g1)
        .def_readonly("g2", &Jet2::g2)
        .def_readonly("h11", &Jet2::h11)
        .def_readonly("h12", &Jet2::h12)
        .def_readonly("h22", &Jet2::h22)
        .def("hess_det", &Jet2::hess_det)
        .def("hess_trace", &Jet2::hess_trace);

    py::class_<HarmonicField>(m, "HarmonicField")
        .def_static("sample", &HarmonicField::sample, py::arg("ell"), py::arg("seed"))
        .def_static(
            "from_coeffs",
            [](int ell, const std::vector<double>& a) { return HarmonicField::from_coeffs(ell, a); },
            py::arg("ell"), py::arg("coeffs_a"))
        .def_property_readonly("ell", &HarmonicField::ell)
        .def_property_readonly("seed", &HarmonicField::seed)
        .def_property_readonly("coeffs_a",
                               [](const HarmonicField& f) { return f.coeffs_a(); })
        .def_property_readonly("coeffs_b",
                               [](const HarmonicField& f) { return f.coeffs_b(); })
        .def("value",
             [](const HarmonicField& f, double theta, double phi) {
                 return f.value({theta, phi});
             })
        .def("jet",
             [](const HarmonicField& f, double theta, double phi) { return f.jet({theta, phi}); })
        .def("negated", &HarmonicField::negated)
        .def("save_json", &HarmonicField::save_json)
        .def_static("load_json", &HarmonicField::load_json);

    m.def(
        "legendre_eval",
        [](int ell, double x) {
            const auto t = legendre_eval(ell, x);
            return py::make_tuple(t.p, t.dp, t.ddp);
        },
        py::arg("ell"), py::arg("x"), "P_ell(x) and its first two derivatives");
    m.def("assoc_legendre_norm", &assoc_legendre_norm, py::arg("ell"), py::arg("m"), py::arg("x"));
    m.def(
        "hilb_approx",
        [](int ell, int r, double phi, double envelope_const) {
            const auto h = hilb_approx(ell, r, phi, {envelope_const, 1.0});
            return py::make_tuple(h.approx, h.envelope);
        },
        py::arg("ell"), py::arg("r"), py::arg("phi"), py::arg("envelope_const") = 5.0);
    m.def(
        "gauss_legendre",
        [](int n) {
            const auto r = gauss_legendre(n);
            return py::make_tuple(r.nodes, r.weights);
        },
        py::arg("n"));

    m.def("hermite", &hermite, py::arg("q"), py::arg("u"));
    m.def("covariance_fn",
          [](int ell, double t1, double p1, double t2, double p2) {
              return covariance_fn(ell, {t1, p1}, {t2, p2});
          });

    m.def("sigma_and_cholesky", [](int ell) {
        const auto [sig, L] = sigma_and_cholesky(ell);
        return py::make_tuple(mat5_to_numpy(sig.m), mat5_to_numpy(L.matrix()));
    });

    m.def(
        "sample_polyspectrum",
        [](const HarmonicField& f, int q, int qmax) {
            const auto grid = build_grid(f.ell(), qmax);
            return sample_polyspectrum(f, q, grid);
        },
        py::arg("field"), py::arg("q"), py::arg("qmax") = 4);
    m.def("polyspectrum_variance_exact", &polyspectrum_variance_exact, py::arg("ell"),
          py::arg("q"));

    m.def(
        "find_critical_points",
        [](const HarmonicField& f, int grid_factor) {
            CritOptions opt;
            opt.grid_factor = grid_factor;
            const auto pts = find_critical_points(f, opt);
            py::list out;
            for (const auto& p : pts) {
                py::dict d;
                d["theta"] = p.point.theta;
                d["phi"] = p.point.phi;
                d["value"] = p.value;
                d["kind"] = p.kind == CritKind::minimum
                                ? "minimum"
                                : (p.kind == CritKind::saddle ? "saddle" : "maximum");
                d["residual"] = p.residual;
                d["hess_det"] = p.hess_det;
                out.append(d);
            }
            return out;
        },
        py::arg("field"), py::arg("grid_factor") = 8);
    m.def(
        "euler_characteristic",
        [](const HarmonicField& f, double u, int grid_factor) {
            CritOptions opt;
            opt.grid_factor = grid_factor;
            return euler_characteristic(find_critical_points(f, opt), u);
        },
        py::arg("field"), py::arg("u"), py::arg("grid_factor") = 8);

    m.def("level_length", &level_length, py::arg("field"), py::arg("u"),
          py::arg("resolution_factor") = 8);
    m.def(
        "excursion_area",
        [](const HarmonicField& f, double u, int qmax) {
            return excursion_area(f, u, build_grid(f.ell(), qmax));
        },
        py::arg("field"), py::arg("u"), py::arg("qmax") = 4);

    m.def("density_pi1c", &density_pi1c);
    m.def("density_p3c", &density_p3c);
    m.def("nu_c", [](double lo, double hi) { return nu_c({lo, hi}); });
    m.def("predicted_moments", [](int ell) {
        const auto s = predicted_moments(ell);
        py::dict d;
        d["mean_crit"] = s.mean_crit;
        d["var_crit_leading"] = s.var_crit_leading;
        d["var_h4_leading"] = s.var_h4_leading;
        d["var_A_leading"] = s.var_A_leading;
        d["cov_crit_A_leading"] = s.cov_crit_A_leading;
        d["scale_A"] = s.scale_A;
        return d;
    });
    m.def("trispectrum_proxy", &trispectrum_proxy, py::arg("h4"), py::arg("ell"));

    m.def(
        "liwei_expectation",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> A,
           py::array_t<double, py::array::c_style | py::array::forcecast> Sigma, double tol) {
            return liwei_expectation(numpy_to_mat3(A), numpy_to_mat3(Sigma), tol);
        },
        py::arg("A"), py::arg("Sigma"), py::arg("tol") = 1e-8);
    m.def(
        "moment_Ir",
        [](int r, const std::string& method, std::uint64_t n, std::uint64_t seed) {
            const auto v = moment_Ir(
                r, method == "liwei" ? IrMethod::liwei_integral : IrMethod::montecarlo, n, seed);
            return py::make_tuple(v.value, v.stderr_);
        },
        py::arg("r"), py::arg("method") = "montecarlo", py::arg("n") = 1'000'000,
        py::arg("seed") = 0x19A2B);
    m.def(
        "projection_coefficient",
        [](const std::vector<int>& q, const std::string& method, std::uint64_t n,
           std::uint64_t seed) {
            if (q.size() != 5) throw std::invalid_argument("pattern must have 5 exponents");
            HermitePattern p{{q[0], q[1], q[2], q[3], q[4]}};
            CoeffMethod cm = CoeffMethod::montecarlo;
            if (method == "closed") cm = CoeffMethod::closed;
            else if (method == "liwei") cm = CoeffMethod::liwei_assisted;
            const auto v = projection_coefficient(p, cm, n, seed);
            return py::make_tuple(v.value, v.stderr_);
        },
        py::arg("pattern"), py::arg("method") = "closed", py::arg("n") = 1'000'000,
        py::arg("seed") = 0x712EC7);
    m.def("lemma_integral", [](int ell, int r1, int r2) {
        const auto li = lemma_integral(ell, r1, r2);
        return py::make_tuple(li.value, li.asymptotic);
    });
}
