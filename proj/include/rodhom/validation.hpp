#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rodhom/pipeline.hpp"

namespace rodhom {

// One measured quantity compared against a limit.
struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "<" or ">"
    double limit = 0.0;
    bool pass = false;
};

Check make_check(std::string name, double value, std::string relation, double limit);

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0 disables the runtime check
    std::string error;        // set when the evaluation threw

    bool pass() const;
    std::string summary() const;  // one line: id, title, PASS/FAIL, worst check
};

nlohmann::json to_json(const CriterionResult& c);

// Torsion constant of a rectangle of unit area from the classical series of the
// Prandtl stress function; aspect is width over height.
double saint_venant_torsion(double aspect, int terms = 200);

// Symmetry, coercivity and bend/stretch decoupling of the rod tensor.
CriterionResult tensor_sanity(const Model& model, int id = 1);

// Homogeneous isotropic lambda = mu = 1 against the Euler-Bernoulli and
// Saint-Venant values on the given rectangle mesh.
CriterionResult classical_limits(int nx, int ny, int n_y, int id = 2);

struct SpectrumSweep {
    SpectrumReport report;
    std::vector<double> lambda_zero;  // five smallest at chi = 0
};

SpectrumSweep spectrum_sweep(const AssembledForms& forms, const std::vector<double>& chis);
CriterionResult spectral_scalings(const SpectrumSweep& sweep, int id = 3);

// Criterion limits for the fiber studies: L2 slope per component and order.
double fiber_slope_limit(Regime regime, Component comp, int order);
// Fiber studies as rate entries (eps column holds chi, norm L2).
// Rows with an L2 error at or below floor make the entry NON-CONCLUSIVE.
RateReport fiber_rate_report(const std::vector<FiberRateStudy>& studies, double floor);
CriterionResult fiber_rates(const std::vector<FiberRateStudy>& studies, double seconds, double floor,
                            int id = 4);

// Exact identities of the transforms, the smoothing and the momentum operators
// on seeded random data over a box of N periods.
CriterionResult algebraic_identities(const Model& model, int N, double L, std::uint64_t seed,
                                     int id = 5);

struct ContourSample {
    Regime regime;
    double chi;
    ContourReport report;
};

std::vector<ContourSample> contour_samples(const Model& model, const ExperimentConfig& cfg);
CriterionResult contour_equivalence(const std::vector<ContourSample>& samples, int id = 6);

// Slope checks of rate reports; for entries that are not conclusive the check fails.
CriterionResult rate_criterion(int id, const std::string& title,
                               const std::vector<const RateReport*>& reports, double time_limit);

// Reference resolvent self-adjointness and the line/fiber consistency.
CriterionResult discrete_consistency(const Model& model, const ExperimentConfig& cfg, int N,
                                     int id = 0);

// Worst kernel residual of all corrector right-hand sides seen by the suite.
CriterionResult kernel_residuals(const std::vector<std::pair<std::string, double>>& sources,
                                 double limit, int id = 10);

}  // namespace rodhom
