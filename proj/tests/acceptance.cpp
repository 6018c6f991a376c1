// Acceptance suite: one line per criterion, exit code 0 iff every criterion passes.
// Usage: rodhom_acceptance [report.json]

#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <string>
#include <vector>

#include "rodhom/validation.hpp"

using namespace rodhom;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const CriterionResult& c, std::vector<CriterionResult>& all) {
    std::cout << c.summary() << std::endl;
    if (!c.pass())
        for (const auto& k : c.checks)
            if (!k.pass)
                std::cout << "    failing: " << k.name << " = " << k.value << " (" << k.relation << " "
                          << k.limit << ")" << std::endl;
    all.push_back(c);
}

RateReport run_rates(const Model& model, ExperimentConfig cfg, int order) {
    cfg.order = order;
    std::vector<RodRegime> regimes;
    for (RodRegime r : cfg.regimes)
        if (order < 2 || r != RodRegime::General) regimes.push_back(r);
    cfg.regimes = regimes;
    return rate_experiment(model, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = Clock::now();
    std::vector<CriterionResult> all;
    std::vector<std::pair<std::string, double>> kernels;
    const ExperimentConfig cfg = ExperimentConfig::defaults();

    {
        const auto t0 = Clock::now();
        CriterionResult c;
        try {
            const Model m1 = build_model(two_phase_profile(5.0),
                                         make_product_mesh(build_rectangle(1.0, 8, 8), 16));
            c = tensor_sanity(m1, 1);
        } catch (const std::exception& e) {
            c.id = 1;
            c.title = "homogenised tensor sanity";
            c.error = e.what();
        }
        c.seconds = since(t0);
        c.time_limit = 60.0;
        report(c, all);
    }

    report(classical_limits(12, 12, 4, 2), all);

    const Model model = build_model(cfg);

    {
        const auto t0 = Clock::now();
        CriterionResult c;
        try {
            c = spectral_scalings(spectrum_sweep(model.f(), cfg.chi_grid), 3);
        } catch (const std::exception& e) {
            c.id = 3;
            c.title = "spectral scalings";
            c.error = e.what();
        }
        c.seconds = since(t0);
        report(c, all);
    }

    {
        const auto t0 = Clock::now();
        std::vector<FiberRateStudy> studies;
        CriterionResult c;
        try {
            for (Regime r : cfg.fiber_regimes)
                studies.push_back(fiber_rate_study(model.f(), r, cfg.chi_grid, cfg.fiber_loads, cfg.seed));
            c = fiber_rates(studies, since(t0), cfg.error_floor, 4);
            for (const auto& s : studies)
                kernels.emplace_back("fiber " + to_string(s.regime), s.max_kernel_residual);
        } catch (const std::exception& e) {
            c.id = 4;
            c.title = "fiber approximation rates";
            c.error = e.what();
            kernels.emplace_back("fiber studies (threw)", std::numeric_limits<double>::infinity());
        }
        report(c, all);
    }

    report(algebraic_identities(model, 16, cfg.L, cfg.seed, 5), all);

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
        report(c, all);
    }

    std::vector<RateReport> rates(3);
    RateReport ablation;
    bool rates_ok = true;
    try {
        for (int order = 0; order < 3; ++order) {
            rates[order] = run_rates(model, cfg, order);
            kernels.emplace_back(rates[order].name, rates[order].max_kernel_residual);
        }
        ablation = ablation_experiment(model, cfg);
        ablation.name = "ablation";
        kernels.emplace_back(ablation.name, ablation.max_kernel_residual);
    } catch (const std::exception& e) {
        rates_ok = false;
        std::cout << "rate experiments threw: " << e.what() << std::endl;
        kernels.emplace_back("rate experiments (threw)", std::numeric_limits<double>::infinity());
    }
    if (rates_ok) {
        report(rate_criterion(7, "norm-resolvent rates", {&rates[0]}, 900.0), all);
        report(rate_criterion(8, "corrector upgrades", {&rates[1], &rates[2]}, 0.0), all);
        report(rate_criterion(9, "ablations", {&ablation}, 0.0), all);
    } else {
        for (int id : {7, 8, 9}) {
            CriterionResult c;
            c.id = id;
            c.title = "rate experiments";
            c.error = "rate experiment failed";
            report(c, all);
        }
    }

    report(kernel_residuals(kernels, cfg.kernel_tol, 10), all);

    CriterionResult extra = discrete_consistency(model, cfg, 16, 0);
    extra.title = "supplementary: line/fiber consistency and reference self-adjointness";
    std::cout << extra.summary() << std::endl;

    bool ok = extra.pass();
    nlohmann::json out{{"provenance", provenance(model, cfg)}, {"criteria", nlohmann::json::array()}};
    for (const auto& c : all) {
        ok = ok && c.pass();
        out["criteria"].push_back(to_json(c));
    }
    out["supplementary"] = to_json(extra);
    out["rates"] = nlohmann::json::array();
    for (const auto& r : rates) out["rates"].push_back(to_json(r));
    out["rates"].push_back(to_json(ablation));
    out["seconds"] = since(start);
    out["pass"] = ok;
    if (argc > 1) std::ofstream(argv[1]) << out.dump(2) << "\n";
    std::cout << (ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << " (" << since(start) << " s)"
              << std::endl;
    return ok ? 0 : 1;
}
