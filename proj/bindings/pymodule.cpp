#include "igkit/acceptance.hpp"
#include "igkit/chentsov.hpp"
#include "igkit/errors.hpp"
#include "igkit/modelspec.hpp"
#include "igkit/natgrad.hpp"
#include "igkit/orlicz.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace igkit;

namespace {

struct PyModel {
    ModelSpec spec;

    std::vector<double> x_or_mid(const std::optional<std::vector<double>>& x) const {
        return x ? *x : spec.model.box().midpoint();
    }
};

PyModel load(const std::string& source) {
    PyModel m;
    // Accept either a file path or an inline JSON document.
    if (!source.empty() && source.front() == '{')
        m.spec = parse_model_spec(nlohmann::ordered_json::parse(source));
    else
        m.spec = load_model_spec(source);
    return m;
}

const Statistic& need_statistic(const PyModel& m) {
    if (!m.spec.statistic)
        throw InvalidSpec("the spec has no 'statistic' block");
    return *m.spec.statistic;
}

} // namespace

PYBIND11_MODULE(_igkit, mod) {
    mod.doc() = "information-geometry verification toolkit";

    py::register_exception<Error>(mod, "IgkitError");

    py::class_<PyModel>(mod, "Model")
        .def_static("load", &load, py::arg("source"),
                    "Load a model from a JSON spec file path or inline JSON text.")
        .def_property_readonly("dim", [](const PyModel& m) { return m.spec.model.dim(); })
        .def_property_readonly("statistical",
                               [](const PyModel& m) { return m.spec.model.statistical(); })
        .def("mass",
             [](const PyModel& m, std::optional<std::vector<double>> x) {
                 return m.spec.model.mass(m.x_or_mid(x));
             },
             py::arg("x") = py::none())
        .def("fisher_matrix",
             [](const PyModel& m, std::optional<std::vector<double>> x) {
                 return fisher_matrix(m.spec.model, m.x_or_mid(x));
             },
             py::arg("x") = py::none())
        .def("one_form",
             [](const PyModel& m, std::vector<double> x, std::vector<double> v) {
                 return one_form_A(m.spec.model, x, v).value;
             })
        .def("amari_chentsov",
             [](const PyModel& m, std::vector<double> x, std::vector<double> v,
                std::vector<double> w, std::vector<double> u) {
                 return ac_tensor(m.spec.model, x, v, w, u).value;
             })
        .def("integrability",
             [](const PyModel& m, int k) {
                 IntegrabilityReport r = check_k_integrability(m.spec.model, k);
                 switch (r.verdict) {
                     case IntegrabilityReport::Verdict::Pass: return "pass";
                     case IntegrabilityReport::Verdict::Fail: return "fail";
                     default: return "divergent";
                 }
             },
             py::arg("k"))
        .def("sufficiency",
             [](const PyModel& m) {
                 SufficiencyVerdict v = check_sufficiency(m.spec.model, need_statistic(m));
                 switch (v.verdict) {
                     case SufficiencyVerdict::Verdict::Sufficient: return "sufficient";
                     case SufficiencyVerdict::Verdict::NotSufficient:
                         return "not_sufficient";
                     default: return "inconclusive";
                 }
             })
        .def("monotonicity_gap",
             [](const PyModel& m, std::vector<double> x, std::vector<double> v) {
                 return monotonicity_gap(m.spec.model, need_statistic(m), x, v);
             })
        .def("information_loss",
             [](const PyModel& m, std::vector<double> x, std::vector<double> v) {
                 InfoLoss il = information_loss(m.spec.model, need_statistic(m), x, v);
                 return py::make_tuple(il.loss, il.residual);
             })
        .def("orlicz_norm",
             [](const PyModel& m, std::optional<std::vector<double>> x) {
                 std::vector<double> xv = m.x_or_mid(x);
                 ParametrizedModel pm = m.spec.model;
                 return orlicz_norm(
                     [pm, xv](const Point& w) {
                         return std::log(pm.density_value(xv, w));
                     },
                     pm.reference(), YoungFunction::cosh_minus_one());
             },
             py::arg("x") = py::none())
        .def("natgrad_descend",
             [](const PyModel& m, std::vector<double> x0,
                std::vector<double> target_weights, double eta) {
                 Measure q = Measure::from_weights(m.spec.model.space(),
                                                   std::move(target_weights));
                 NatGradConfig cfg;
                 cfg.eta = eta;
                 Trajectory tr =
                     descend(m.spec.model, std::move(x0), kl_to_target(m.spec.model, q), cfg);
                 py::dict out;
                 out["xs"] = tr.xs;
                 out["objectives"] = tr.objectives;
                 out["converged"] = tr.converged;
                 out["monotone_decrease"] = tr.monotone_decrease;
                 return out;
             },
             py::arg("x0"), py::arg("target_weights"), py::arg("eta") = 0.1);

    mod.def("verify_all",
            [](std::uint64_t seed) {
                AcceptanceReport rep = run_acceptance(seed);
                py::list out;
                for (const auto& c : rep.criteria)
                    out.append(py::make_tuple(c.id, c.name, c.passed, c.detail));
                return out;
            },
            py::arg("seed") = 42);
}
