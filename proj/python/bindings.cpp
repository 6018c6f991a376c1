#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rodhom/validation.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace rodhom;

namespace {

ExperimentConfig parse_config(const std::string& text) {
    return text.empty() ? ExperimentConfig::defaults() : ExperimentConfig::from_json(json::parse(text));
}

std::string homogenize(const std::string& config) {
    const ExperimentConfig cfg = parse_config(config);
    const Model model = build_model(cfg);
    json j = homogenized_json(model);
    j["provenance"] = provenance(model, cfg);
    j["sanity"] = to_json(tensor_sanity(model));
    return j.dump();
}

std::string rates(const std::string& config, int order) {
    ExperimentConfig cfg = parse_config(config);
    cfg.order = order;
    const Model model = build_model(cfg);
    py::gil_scoped_release release;
    return json{{"provenance", provenance(model, cfg)}, {"report", to_json(rate_experiment(model, cfg))}}.dump();
}

std::string spectrum(const std::string& config) {
    const ExperimentConfig cfg = parse_config(config);
    const Model model = build_model(cfg);
    py::gil_scoped_release release;
    const SpectrumSweep s = spectrum_sweep(model.f(), cfg.chi_grid);
    json rows = json::array();
    for (const auto& r : s.report.rows) rows.push_back({{"chi", r.chi}, {"lambda", r.lambda}});
    return json{{"rows", rows}, {"lambda_zero", s.lambda_zero}, {"criterion", to_json(spectral_scalings(s))}}.dump();
}

std::string identities(const std::string& config, int N) {
    const ExperimentConfig cfg = parse_config(config);
    const Model model = build_model(cfg);
    return json{{"identities", to_json(algebraic_identities(model, N, cfg.L, cfg.seed))},
                {"consistency", to_json(discrete_consistency(model, cfg, N))}}
        .dump();
}

Eigen::Matrix4d isotropic_rod_tensor(double lambda, double mu, int nx, int ny, int n_y, double aspect) {
    return rod_tensor(homogeneous_profile(make_isotropic(lambda, mu)),
                      make_product_mesh(build_rectangle(aspect, nx, ny), n_y))
        .A_rod;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Homogenised rod tensors and resolvent rate experiments";
    py::register_exception<Error>(m, "RodhomError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("default_config", [] { return ExperimentConfig::defaults().to_json().dump(); },
          "Default experiment configuration as a JSON string.");
    m.def("normalise_config", [](const std::string& c) { return parse_config(c).to_json().dump(); },
          py::arg("config"), "Validated configuration with defaults filled in.");
    m.def("homogenize", &homogenize, py::arg("config") = "",
          "Rod tensor, moments and sanity checks as a JSON string.");
    m.def("rates", &rates, py::arg("config") = "", py::arg("order") = 0,
          "Rate experiment of the given approximation order as a JSON string.");
    m.def("spectrum", &spectrum, py::arg("config") = "", "Five smallest fiber eigenvalues on the chi grid.");
    m.def("identities", &identities, py::arg("config") = "", py::arg("N") = 8,
          "Exact identities and discrete consistency checks.");
    m.def("isotropic_rod_tensor", &isotropic_rod_tensor, py::arg("lam"), py::arg("mu"), py::arg("nx") = 8,
          py::arg("ny") = 8, py::arg("n_y") = 2, py::arg("aspect") = 1.0,
          "4x4 rod tensor of a homogeneous isotropic rectangle.");
    m.def("saint_venant_torsion", &saint_venant_torsion, py::arg("aspect"), py::arg("terms") = 200,
          "Torsion constant of a unit-area rectangle.");
}
