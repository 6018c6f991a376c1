#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "rodhom/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rodhom;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return ExperimentConfig::defaults();
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path);
    return ExperimentConfig::from_json(json::parse(in));
}

struct Outcome {
    std::vector<CriterionResult> criteria;
    json extra = json::object();

    bool pass() const {
        for (const auto& c : criteria)
            if (!c.pass()) return false;
        return true;
    }
};

void log_criteria(const Outcome& o) {
    for (const auto& c : o.criteria) {
        if (c.pass()) spdlog::info("{}", c.summary());
        else spdlog::error("{}", c.summary());
        for (const auto& k : c.checks)
            if (!k.pass) spdlog::error("  failing: {} = {:.6g} ({} {:.6g})", k.name, k.value, k.relation, k.limit);
    }
}

void write_report(const std::string& command, const Model& model, const ExperimentConfig& cfg,
                  const Outcome& o, double seconds, const fs::path& out) {
    json crit = json::array();
    for (const auto& c : o.criteria) crit.push_back(to_json(c));
    json j{{"command", command},
           {"pass", o.pass()},
           {"seconds", seconds},
           {"provenance", provenance(model, cfg)},
           {"criteria", crit}};
    for (const auto& [k, v] : o.extra.items()) j[k] = v;
    write_json(j, out / "report.json");
}

Outcome cmd_homogenize(const Model& model, const ExperimentConfig&, const fs::path& out) {
    Outcome o;
    write_json(homogenized_json(model), out / "homogenized.json");
    o.criteria.push_back(tensor_sanity(model, 1));
    return o;
}

Outcome cmd_spectrum(const Model& model, const ExperimentConfig& cfg, const fs::path& out) {
    Outcome o;
    const auto t0 = Clock::now();
    const SpectrumSweep sweep = spectrum_sweep(model.f(), cfg.chi_grid);
    CriterionResult c = spectral_scalings(sweep, 3);
    c.seconds = since(t0);
    o.criteria.push_back(c);
    std::ofstream csv(out / "spectrum.csv");
    csv << "chi,lambda1,lambda2,lambda3,lambda4,lambda5,lambda1_chi4,lambda2_chi4,lambda3_chi2,"
           "lambda4_chi2\n";
    csv << fmt::format("0,{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},,,,\n", sweep.lambda_zero[0],
                       sweep.lambda_zero[1], sweep.lambda_zero[2], sweep.lambda_zero[3],
                       sweep.lambda_zero[4]);
    for (const auto& r : sweep.report.rows) {
        const auto& l = r.lambda;
        const double c2 = r.chi * r.chi, c4 = c2 * c2;
        csv << fmt::format("{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                           r.chi, l[0], l[1], l[2], l[3], l[4], l[0] / c4, l[1] / c4, l[2] / c2,
                           l[3] / c2);
    }
    return o;
}

Outcome cmd_fiber_rates(const Model& model, const ExperimentConfig& cfg, const fs::path& out) {
    Outcome o;
    const auto t0 = Clock::now();
    std::vector<FiberRateStudy> studies;
    for (Regime r : cfg.fiber_regimes) {
        spdlog::info("fiber study {}", to_string(r));
        studies.push_back(fiber_rate_study(model.f(), r, cfg.chi_grid, cfg.fiber_loads, cfg.seed));
    }
    o.criteria.push_back(fiber_rates(studies, since(t0), cfg.error_floor, 4));
    std::vector<std::pair<std::string, double>> kernels;
    for (const auto& s : studies) kernels.emplace_back("fiber " + to_string(s.regime), s.max_kernel_residual);
    o.criteria.push_back(kernel_residuals(kernels, cfg.kernel_tol, 10));
    write_fiber_rates_csv(studies, out / "fiber_rates.csv");
    RateReport rep = fiber_rate_report(studies, cfg.error_floor);
    rep.seconds = since(t0);
    write_rates_csv({rep}, out / "rates.csv");
    o.extra["rates"] = to_json(rep);
    return o;
}

Outcome rates_command(int order, const Model& model, ExperimentConfig cfg, const fs::path& out) {
    if (cfg.order != order)
        spdlog::info("order {} set by the subcommand (config had {})", order, cfg.order);
    cfg.order = order;
    if (order == 2) {
        std::vector<RodRegime> keep;
        for (RodRegime r : cfg.regimes)
            if (r != RodRegime::General) keep.push_back(r);
            else spdlog::warn("order 2 is not available for the general regime; skipped");
        cfg.regimes = keep;
    }
    const RateReport rep = rate_experiment(model, cfg);
    Outcome o;
    static const std::map<int, std::pair<int, std::string>> names{
        {0, {7, "norm-resolvent rates"}}, {1, {8, "H1 corrector rates"}}, {2, {8, "higher-order rates"}}};
    const auto& [id, title] = names.at(order);
    o.criteria.push_back(rate_criterion(id, title, {&rep}, 0.0));
    o.criteria.push_back(kernel_residuals({{rep.name, rep.max_kernel_residual}}, cfg.kernel_tol, 10));
    write_rates_csv({rep}, out / "rates.csv");
    o.extra["rates"] = to_json(rep);
    return o;
}

Outcome cmd_validate(const Model& model, const ExperimentConfig& cfg, const fs::path& out) {
    Outcome o;
    const int N = cfg.N_grid.front() * 2;
    o.criteria.push_back(algebraic_identities(model, N, cfg.L, cfg.seed, 5));
    {
        const auto t0 = Clock::now();
        CriterionResult c;
        try {
            c = contour_equivalence(contour_samples(model, cfg), 6);
        } catch (const std::exception& e) {
            c.id = 6;
            c.title = "contour equivalence";
            c.error = e.what();
        }
        c.seconds = since(t0);
        o.criteria.push_back(c);
    }
    o.criteria.push_back(discrete_consistency(model, cfg, N, 0));
    ExperimentConfig acfg = cfg;
    acfg.order = 0;
    acfg.flags = ExperimentFlags{};
    RateReport rep = ablation_experiment(model, acfg);
    rep.name = "ablation";
    o.criteria.push_back(rate_criterion(9, "ablations", {&rep}, 0.0));
    o.criteria.push_back(kernel_residuals({{rep.name, rep.max_kernel_residual}}, cfg.kernel_tol, 10));
    write_rates_csv({rep}, out / "rates.csv");
    o.extra["rates"] = to_json(rep);
    return o;
}

using Command = std::function<Outcome(const Model&, const ExperimentConfig&, const fs::path&)>;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resolvent asymptotics of thin heterogeneous elastic rods"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    bool verbose = false;

    const std::vector<std::pair<std::string, std::string>> descriptions{
        {"homogenize", "homogenised rod tensor and its sanity checks"},
        {"spectrum", "scaling of the five smallest fiber eigenvalues"},
        {"fiber-rates", "fiber-level approximation rates in chi"},
        {"resolvent-rates", "L2 norm-resolvent rates of the homogenised approximant"},
        {"h1-rates", "H1 rates with the first-order corrector"},
        {"higher-order-rates", "L2 rates with the higher-order corrector"},
        {"validate", "identities, contour equivalence, consistency and ablations"}};
    for (const auto& [name, desc] : descriptions) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON experiment configuration (defaults if omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_flag("-v,--verbose", verbose, "debug logging");
    }
    CLI11_PARSE(app, argc, argv);

    const std::map<std::string, Command> commands{
        {"homogenize", cmd_homogenize},
        {"spectrum", cmd_spectrum},
        {"fiber-rates", cmd_fiber_rates},
        {"resolvent-rates",
         [](const Model& m, const ExperimentConfig& c, const fs::path& o) { return rates_command(0, m, c, o); }},
        {"h1-rates",
         [](const Model& m, const ExperimentConfig& c, const fs::path& o) { return rates_command(1, m, c, o); }},
        {"higher-order-rates",
         [](const Model& m, const ExperimentConfig& c, const fs::path& o) { return rates_command(2, m, c, o); }},
        {"validate", cmd_validate}};

    const std::string name = app.get_subcommands().front()->get_name();
    if (verbose) spdlog::set_level(spdlog::level::debug);
    try {
        const auto t0 = Clock::now();
        const ExperimentConfig cfg = load_config(config_path);
        const fs::path out(out_dir);
        fs::create_directories(out);
        spdlog::info("{}: building model", name);
        const Model model = build_model(cfg);
        spdlog::debug("mesh {} material {}", model.mesh_hash, model.material_hash);
        const Outcome o = commands.at(name)(model, cfg, out);
        log_criteria(o);
        write_report(name, model, cfg, o, since(t0), out);
        spdlog::info("{} {} in {:.1f} s; outputs in {}", name, o.pass() ? "passed" : "FAILED", since(t0),
                     out.string());
        return o.pass() ? 0 : 1;
    } catch (const std::exception& e) {
        spdlog::error("{}: {}", name, e.what());
        return 2;
    }
}
