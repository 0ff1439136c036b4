#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hgroup/harness.hpp"
#include "hgroup/lp.hpp"

namespace py = pybind11;
using namespace hg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridFunction to_grid(const GridSpec& s, const Array& a) {
    if ((size_t)a.size() != s.size()) throw Error(ErrorCode::DimensionMismatch, "array size does not match the grid");
    return GridFunction(s, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const GridFunction& f) {
    std::vector<py::ssize_t> shape(f.spec().N.begin(), f.spec().N.end());
    Array out(shape);
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "harmonic analysis on stratified groups";
    py::register_exception<Error>(m, "HgError", PyExc_RuntimeError);

    py::class_<GradedGroup>(m, "Group")
        .def_property_readonly("name", &GradedGroup::name)
        .def_property_readonly("dim", &GradedGroup::dim)
        .def_property_readonly("step", &GradedGroup::step)
        .def_property_readonly("hom_dim", &GradedGroup::hom_dim)
        .def_property_readonly("layer_dims", &GradedGroup::layer_dims)
        .def("mul", [](const GradedGroup& G, const Point& x, const Point& y) { return mul(G, x, y); })
        .def("inverse", [](const GradedGroup& G, const Point& x) { return inverse(G, x); })
        .def("dilate", [](const GradedGroup& G, double l, const Point& x) { return dilate(G, l, x); })
        .def("norm", [](const GradedGroup& G, const Point& x) { return hnorm(G, x); })
        .def("norm_sigma", [](const GradedGroup& G, int s, const Point& x) { return hnorm_sigma(G, s, x); });

    m.def("heisenberg", &heisenberg, py::arg("n"));
    m.def("abelian", &abelian, py::arg("n"));
    m.def("engel", &engel);
    m.def("group_by_name", &group_by_name);
    m.def("parse_group", &parse_group, py::arg("text"), py::arg("name") = "file");

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<std::vector<int>, std::vector<double>>(), py::arg("N"), py::arg("L"))
        .def_readonly("N", &GridSpec::N)
        .def_readonly("L", &GridSpec::L)
        .def("h", &GridSpec::h);
    m.def("grid_for", &grid_for, py::arg("group"), py::arg("N"), py::arg("L"), py::arg("T"));

    m.def(
        "make_test_function",
        [](const std::string& kind, const GradedGroup& G, const GridSpec& s, double width, std::vector<double> center,
           int j1, int j2, double envelope, unsigned long long seed) {
            TestFunctionParams p;
            p.width = width;
            p.center = std::move(center);
            p.j1 = j1;
            p.j2 = j2;
            p.envelope = envelope;
            p.seed = seed;
            return to_array(make_test_function(kind, G, s, p));
        },
        py::arg("kind"), py::arg("group"), py::arg("spec"), py::arg("width") = 1.0, py::arg("center") = std::vector<double>{},
        py::arg("j1") = -1, py::arg("j2") = 1, py::arg("envelope") = 2.0, py::arg("seed") = 1);

    m.def(
        "convolve",
        [](const GradedGroup& G, const GridSpec& s, const Array& f, const Array& g) {
            return to_array(convolve(G, to_grid(s, f), to_grid(s, g)));
        },
        py::arg("group"), py::arg("spec"), py::arg("f"), py::arg("g"));
    m.def(
        "xk", [](const GradedGroup& G, const GridSpec& s, int k, const Array& f) { return to_array(xk(G, k, to_grid(s, f))); },
        py::arg("group"), py::arg("spec"), py::arg("k"), py::arg("f"));
    m.def(
        "integral", [](const GridSpec& s, const Array& f) { return to_grid(s, f).integral(); }, py::arg("spec"), py::arg("f"));

    py::class_<KernelBank>(m, "KernelBank")
        .def(py::init([](const GradedGroup& G, const GridSpec& s, int j_min, int j_max) {
                 return KernelBank(G, s, BankParams{j_min, j_max});
             }),
             py::arg("group"), py::arg("spec"), py::arg("j_min") = -4, py::arg("j_max") = 4)
        .def("psi", [](const KernelBank& b, int j) { return to_array(b.psi(j)); })
        .def("heat", [](const KernelBank& b, int j) { return to_array(b.heat(j)); })
        .def("delta", [](const KernelBank& b, int j) { return to_array(b.delta(j)); })
        .def(
            "decompose",
            [](const KernelBank& b, const Array& f, int j_min, int j_max) {
                auto d = lp_decompose(b, to_grid(b.spec(), f), j_min, j_max);
                std::map<int, Array> out;
                for (const auto& [j, p] : d.pieces) out.emplace(j, to_array(p));
                return out;
            },
            py::arg("f"), py::arg("j_min"), py::arg("j_max"));

    m.def("default_config", [] { return ExperimentConfig().to_text(); });
    m.def(
        "run_suite",
        [](const std::string& text) {
            Report r = run_suite(ExperimentConfig::parse(text));
            return py::make_tuple(r.exit_code(), r.payload().dump());
        },
        py::arg("config_text"), "returns (exit_code, payload JSON)");
    m.def("canonical_config", [](const std::string& text) { return ExperimentConfig::parse(text).to_text(); });
}
