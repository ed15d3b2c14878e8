#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lorenzband/band.hpp"
#include "lorenzband/design.hpp"
#include "lorenzband/errors.hpp"
#include "lorenzband/experiment.hpp"
#include "lorenzband/lorenz.hpp"
#include "lorenzband/population.hpp"

namespace py = pybind11;
using namespace lorenzband;

namespace {

std::vector<std::pair<double, double>> as_pairs(const std::vector<CurvePoint>& points) {
    std::vector<std::pair<double, double>> out;
    out.reserve(points.size());
    for (const auto& pt : points) out.emplace_back(pt.p, pt.q);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lorenz curve estimation with pointwise and simultaneous confidence bands";

    py::register_exception<Error>(m, "LorenzError");

    py::class_<Population>(m, "Population")
        .def_static("from_incomes", &Population::from_incomes, py::arg("incomes"))
        .def_property_readonly("incomes", [](const Population& p) { return p.y; })
        .def_property_readonly("total", [](const Population& p) { return p.total; })
        .def("__len__", &Population::size);

    py::class_<PiecewiseCurve>(m, "PiecewiseCurve")
        .def_property_readonly("points", [](const PiecewiseCurve& c) { return as_pairs(c.points); })
        .def("at", [](const PiecewiseCurve& c, double p) {
            const CurvePoint pt = c.at_abscissa(p);
            return std::make_pair(pt.p, pt.q);
        }, py::arg("p"));

    py::class_<SampleDraw>(m, "SampleDraw")
        .def_property_readonly("unit_ids", [](const SampleDraw& s) { return s.unit_ids; })
        .def_property_readonly("incomes", [](const SampleDraw& s) { return s.y_s; })
        .def_property_readonly("weights", [](const SampleDraw& s) { return s.w; })
        .def_property_readonly("n", [](const SampleDraw& s) { return s.n; })
        .def_property_readonly("N", [](const SampleDraw& s) { return s.N; });

    py::class_<CurveEstimate>(m, "CurveEstimate")
        .def_property_readonly("points", [](const CurveEstimate& e) { return as_pairs(e.points); })
        .def_property_readonly("n", [](const CurveEstimate& e) { return e.n; });

    py::class_<SigmaPath>(m, "SigmaPath")
        .def("sigma_at", [](const SigmaPath& p, double t) {
            const Mat2 s = p.sigma_at(t);
            return std::make_tuple(s.m00, s.m01, s.m10, s.m11);
        }, py::arg("t"));

    py::class_<Band>(m, "Band")
        .def_property_readonly("critical", [](const Band& b) { return b.critical; })
        .def_property_readonly("alpha", [](const Band& b) { return b.alpha; })
        .def_property_readonly("kind",
                               [](const Band& b) { return b.kind == BandKind::pcb ? "pcb" : "scb"; })
        .def("contains", [](const Band& b, double p, double q) {
            return band_contains(b, CurvePoint{p, q});
        }, py::arg("p"), py::arg("q"))
        .def("min_g", [](const Band& b, double p, double q) {
            return band_min_g(b, CurvePoint{p, q});
        }, py::arg("p"), py::arg("q"));

    m.def("load_population", &load_population, py::arg("path"), py::arg("column") = "income");
    m.def("two_class_population", [](double fraction, double share, int n) {
        return synthetic_population(GeneratorSpec::two_class(fraction, share, n), 0);
    }, py::arg("fraction"), py::arg("share"), py::arg("n"));
    m.def("lognormal_population", [](double mu, double sigma, int n, std::uint64_t seed) {
        return synthetic_population(GeneratorSpec::lognormal(mu, sigma, n), seed);
    }, py::arg("mu"), py::arg("sigma"), py::arg("n"), py::arg("seed"));
    m.def("population_lorenz", &population_lorenz, py::arg("population"));
    m.def("gini", &gini, py::arg("curve"));

    m.def("draw_srswor", &draw_srswor, py::arg("population"), py::arg("n"), py::arg("seed"));
    m.def("estimate_points", &estimate_points, py::arg("sample"));
    m.def("make_sigma_path", &make_sigma_path, py::arg("sample"), py::arg("estimate"));
    m.def("estimate_C", &estimate_C, py::arg("path"), py::arg("estimate"), py::arg("draws") = 200,
          py::arg("grid") = 8, py::arg("seed") = 1);
    m.def("pcb_critical", &pcb_critical, py::arg("alpha"));
    m.def("scb_critical", &scb_critical, py::arg("C"), py::arg("alpha"));
    m.def("make_band",
          [](const CurveEstimate& est, const SigmaPath& path, const std::string& kind, double alpha,
             double critical, int t_grid) {
              return make_band(est, path, kind == "pcb" ? BandKind::pcb : BandKind::scb, alpha,
                               critical, t_grid);
          },
          py::arg("estimate"), py::arg("path"), py::arg("kind"), py::arg("alpha"),
          py::arg("critical"), py::arg("t_grid") = 16);

    m.def("trim_curve", &trim_curve, py::arg("curve"), py::arg("trim"));
    m.def("curve_covered", &curve_covered, py::arg("band"), py::arg("target"),
          py::arg("check_grid") = 5000);
}
