#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aniso/config.hpp"
#include "aniso/geometry.hpp"
#include "aniso/symbols.hpp"
#include "aniso/tfa.hpp"
#include "aniso/wavefront.hpp"
#include "aniso/weyl.hpp"

namespace py = pybind11;
using namespace ag;

namespace {

// DistPtr points to const, which pybind11 holders do not accept directly
struct PyDist {
    DistPtr p;
};

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CArray to_array(const std::vector<cplx>& v) {
    CArray a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

std::vector<cplx> from_array(const CArray& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

Signal make_signal(double t0, double dt, const CArray& values) {
    Signal s;
    s.t0 = t0;
    s.dt = dt;
    s.v = from_array(values);
    return s;
}

StftEvaluator evaluator(const PyDist& u, const std::string& window) {
    return StftEvaluator(u.p, Window::from_name(window));
}

EstimatorConfig est_config(const std::optional<RunConfig>& cfg) { return cfg ? cfg->estimator() : EstimatorConfig{}; }

CompareMode mode_of(const std::string& m) {
    if (m == "subset") return CompareMode::Subset;
    if (m == "equal") return CompareMode::Equal;
    throw std::invalid_argument("mode must be 'subset' or 'equal'");
}

}  // namespace

PYBIND11_MODULE(aniso_gabor, m) {
    m.doc() = "Anisotropic Gabor wave front sets";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("solve_lambda", py::overload_cast<double, double, double, double>(&solve_lambda), py::arg("x"),
          py::arg("xi"), py::arg("s"), py::arg("tol") = 1e-12);
    m.def(
        "project",
        [](double x, double xi, double s) {
            double px, pxi;
            project1(x, xi, s, px, pxi);
            return py::make_tuple(px, pxi);
        },
        py::arg("x"), py::arg("xi"), py::arg("s"));
    m.def("direction_angle", &direction_angle);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("s", &RunConfig::s)
        .def_readwrite("window", &RunConfig::window)
        .def_readwrite("grid_T", &RunConfig::grid_T)
        .def_readwrite("grid_n", &RunConfig::grid_n)
        .def_readwrite("edge_taper", &RunConfig::edge_taper)
        .def_readwrite("lambda_min", &RunConfig::lambda_min)
        .def_readwrite("lambda_max", &RunConfig::lambda_max)
        .def_readwrite("lambda_points", &RunConfig::lambda_points)
        .def_readwrite("n_thresh", &RunConfig::n_thresh)
        .def_readwrite("r_max", &RunConfig::r_max)
        .def_readwrite("cap_radius", &RunConfig::cap_radius)
        .def_readwrite("sphere_res", &RunConfig::sphere_res)
        .def_readwrite("tol_deg", &RunConfig::tol_deg)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("noise", &RunConfig::noise)
        .def("validate", &RunConfig::validate)
        .def("to_json", &RunConfig::to_json)
        .def("to_toml", &RunConfig::to_toml)
        .def_static("from_json", &RunConfig::from_json)
        .def_static("from_toml", &RunConfig::from_toml)
        .def_static("load", &RunConfig::load)
        .def("save", &RunConfig::save)
        .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

    py::class_<PyDist>(m, "Distribution")
        .def_property_readonly("kind", [](const PyDist& d) { return d.p->kind(); })
        .def("translated", [](const PyDist& d, double a) { return PyDist{d.p->translated(a)}; })
        .def("modulated", [](const PyDist& d, double eta) { return PyDist{d.p->modulated(eta)}; })
        .def("dilated", [](const PyDist& d, double A) { return PyDist{d.p->dilated(A)}; })
        .def("chirp_multiplied", [](const PyDist& d, double B) { return PyDist{d.p->chirp_multiplied(B)}; })
        .def("fourier", [](const PyDist& d) { return PyDist{d.p->fourier()}; })
        .def(
            "sample",
            [](const PyDist& d, double t0, double dt, size_t n) { return to_array(sample(d.p, t0, dt, n).v); },
            py::arg("t0"), py::arg("dt"), py::arg("n"));

    m.def(
        "sampled_signal",
        [](double t0, double dt, const CArray& values) {
            return PyDist{std::make_shared<SampledDist>(make_signal(t0, dt, values))};
        },
        py::arg("t0"), py::arg("dt"), py::arg("values"));

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("s", &GroundTruth::s)
        .def_readonly("angles", &GroundTruth::angles)
        .def_readonly("exact", &GroundTruth::exact)
        .def_readonly("note", &GroundTruth::note)
        .def("contains", &GroundTruth::contains);

    py::class_<Oracle>(m, "Oracle")
        .def_readonly("name", &Oracle::name)
        .def_readonly("params_json", &Oracle::params_json)
        .def_property_readonly("signal", [](const Oracle& o) { return PyDist{o.u}; })
        .def("truth", [](const Oracle& o, double s) { return o.truth(s); });

    m.def("generate_oracle", &generate_oracle, py::arg("kind"), py::arg("params_json") = "{}");
    m.def("oracle_catalog", &oracle_catalog);

    m.def(
        "stft",
        [](const PyDist& u, double x, double xi, const std::string& window) {
            return evaluator(u, window).eval(x, xi);
        },
        py::arg("u"), py::arg("x"), py::arg("xi"), py::arg("window") = "gaussian");
    m.def(
        "stft_grid",
        [](const PyDist& u, const std::vector<double>& xs, const std::vector<double>& xis,
           const std::string& window) {
            StftEvaluator e = evaluator(u, window);
            py::array_t<cplx> out({xs.size(), xis.size()});
            auto r = out.mutable_unchecked<2>();
            for (size_t i = 0; i < xs.size(); ++i)
                for (size_t k = 0; k < xis.size(); ++k) r(i, k) = e.eval(xs[i], xis[k]);
            return out;
        },
        py::arg("u"), py::arg("xs"), py::arg("xis"), py::arg("window") = "gaussian");

    py::enum_<DirClass>(m, "DirClass")
        .value("Singular", DirClass::Singular)
        .value("Regular", DirClass::Regular)
        .value("Inconclusive", DirClass::Inconclusive);

    py::class_<DecayProfile>(m, "DecayProfile")
        .def_readonly("angle", &DecayProfile::angle)
        .def_readonly("lambda_", &DecayProfile::lambda)
        .def_readonly("log_sup", &DecayProfile::log_sup)
        .def_readonly("slope", &DecayProfile::slope)
        .def_readonly("residual", &DecayProfile::residual)
        .def_readonly("cls", &DecayProfile::cls);

    py::class_<WaveFrontEstimate>(m, "WaveFrontEstimate")
        .def_readonly("s", &WaveFrontEstimate::s)
        .def_readonly("directions", &WaveFrontEstimate::dirs)
        .def("singular_angles", &WaveFrontEstimate::singular_angles)
        .def("count", &WaveFrontEstimate::count)
        .def("to_json", &WaveFrontEstimate::to_json, py::arg("config_json") = "");

    m.def(
        "estimate_wavefront",
        [](const PyDist& u, double s, std::optional<RunConfig> cfg) {
            std::string w = cfg ? cfg->window : "gaussian";
            if (cfg) cfg->validate();
            py::gil_scoped_release release;
            return estimate_wavefront(evaluator(u, w), s, est_config(cfg));
        },
        py::arg("u"), py::arg("s"), py::arg("config") = std::nullopt);

    py::class_<DirSet>(m, "DirSet")
        .def_readonly("s", &DirSet::s)
        .def_readonly("angles", &DirSet::angles)
        .def_readonly("inconclusive", &DirSet::inconclusive)
        .def_readonly("exact", &DirSet::exact)
        .def_static("from_estimate", py::overload_cast<const WaveFrontEstimate&>(&DirSet::from))
        .def_static("from_truth", py::overload_cast<const GroundTruth&>(&DirSet::from))
        .def_static("from_json", &DirSet::from_json);

    py::class_<CompareReport>(m, "CompareReport")
        .def_readonly("passed", &CompareReport::passed)
        .def_readonly("unmatched_a", &CompareReport::unmatched_a)
        .def_readonly("unmatched_b", &CompareReport::unmatched_b)
        .def("summary", &CompareReport::summary)
        .def("to_json", &CompareReport::to_json);

    m.def(
        "compare",
        [](const DirSet& a, const DirSet& b, const std::string& mode, double tol) {
            return compare(a, b, mode_of(mode), tol);
        },
        py::arg("a"), py::arg("b"), py::arg("mode") = "equal", py::arg("tol_deg") = 5.0);

    py::class_<InvarianceCheck>(m, "InvarianceCheck")
        .def_readonly("name", &InvarianceCheck::name)
        .def_readonly("passed", &InvarianceCheck::passed)
        .def_readonly("detail", &InvarianceCheck::detail);
    m.def(
        "invariance_suite",
        [](const PyDist& u, double s, std::optional<RunConfig> cfg) {
            py::gil_scoped_release release;
            return invariance_suite(u.p, s, est_config(cfg));
        },
        py::arg("u"), py::arg("s"), py::arg("config") = std::nullopt);

    py::class_<Poly>(m, "Poly")
        .def_static("from_json", &Poly::from_json)
        .def_static("term", &Poly::term, py::arg("p"), py::arg("q"), py::arg("c") = cplx(1.0))
        .def("to_json", &Poly::to_json)
        .def("degree", &Poly::degree)
        .def("__call__", &Poly::eval1)
        .def("__add__", [](const Poly& a, const Poly& b) { return a + b; })
        .def("__sub__", [](const Poly& a, const Poly& b) { return a - b; })
        .def("__mul__", [](const Poly& a, const Poly& b) { return a * b; })
        .def("__mul__", [](const Poly& a, cplx c) { return a * c; })
        .def("approx_equal", &Poly::approx_equal, py::arg("other"), py::arg("tol") = 0.0);

    m.def("weyl_product", &weyl_product_expansion, py::arg("a"), py::arg("b"), py::arg("order") = -1);
    m.def("quantization_shift", py::overload_cast<const Poly&, double, double>(&quantization_shift),
          py::arg("a"), py::arg("from_t"), py::arg("to_t"));
    m.def(
        "quantize",
        [](const Poly& a, double t, double T, int n) -> Eigen::MatrixXcd {
            return quantize(Symbol::polynomial(a, a.degree(), 1.0), t, GridSpec(T, n)).M;
        },
        py::arg("a"), py::arg("t") = 0.5, py::arg("T") = 16.0, py::arg("n") = 256);
    m.def(
        "weyl_apply",
        [](const Poly& a, const PyDist& u) { return PyDist{weyl_apply_symbolic(a, u.p)}; }, py::arg("a"),
        py::arg("u"));

    py::class_<CharSetEstimate>(m, "CharSetEstimate")
        .def_readonly("s", &CharSetEstimate::s)
        .def_readonly("m1", &CharSetEstimate::m1)
        .def("characteristic_angles", &CharSetEstimate::characteristic_angles)
        .def("to_json", &CharSetEstimate::to_json);
    m.def(
        "char_set",
        [](const Poly& a, double s, double m1, int sphere_res) {
            CharSetOptions opt;
            opt.sphere_res = sphere_res;
            return char_set_poly(Symbol::polynomial(a, a.degree(), s), s, m1, opt);
        },
        py::arg("a"), py::arg("s"), py::arg("m1"), py::arg("sphere_res") = 360);

    py::class_<MembershipVerdict>(m, "MembershipVerdict")
        .def_readonly("bounded", &MembershipVerdict::bounded)
        .def_readonly("worst_ratio", &MembershipVerdict::worst_ratio);
    m.def(
        "check_membership",
        [](const Poly& a, double order, double s, int j) {
            return check_membership(Symbol::polynomial(a, order, s), order, s, j, SymbolSampling{});
        },
        py::arg("a"), py::arg("m"), py::arg("s"), py::arg("j") = 3);
}
