#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rodhom/fiber.hpp"

namespace rodhom {

// Line-level regimes: the full rod (bending and stretching coupled through the
// rod tensor) and the two decoupled regimes of symmetric rods.
enum class RodRegime { General, Stretch, Bend };

std::string to_string(RodRegime r);
RodRegime rod_regime_from_string(const std::string& s);
Component component_from_string(const std::string& s);

struct ExperimentFlags {
    bool xi = true;      // smoothing Xi applied to the load
    bool m0 = false;     // bend momentum int f_hat only, adjoint without axial part, unscaled load
    bool s_inf = false;  // bend load with the axial component removed
    std::string label() const;
};

struct ExperimentConfig {
    nlohmann::json material;
    nlohmann::json geometry;
    double gamma = 0.0;
    double delta = 0.0;
    double L = 4.0;
    std::vector<int> N_grid{8, 12, 16, 24, 32};
    std::vector<RodRegime> regimes{RodRegime::General, RodRegime::Stretch, RodRegime::Bend};
    // Empty selects the natural split: in-plane and axial, or All for stretch.
    std::vector<Component> components;
    // 0: homogenised, 1: plus first corrector (H1 norm), 2: plus second corrector.
    int order = 0;
    ExperimentFlags flags;
    int loads = 5;
    int load_band = 1;  // loads occupy fibers |k| <= load_band
    std::uint64_t seed = 20240611;
    double margin = 0.1;
    double error_floor = 1e-9;
    double residual_tol = 1e-10;
    double kernel_tol = 1e-8;

    // Fiber-level studies.
    std::vector<double> chi_grid{0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05};
    std::vector<Regime> fiber_regimes{Regime::Stretch, Regime::Bend, Regime::General2,
                                      Regime::General4};
    int fiber_loads = 3;
    std::vector<double> contour_chis{0.3, 0.1, 0.05};
    double contour_eps = 0.05;
    int contour_nodes = 256;

    static ExperimentConfig defaults();
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
    std::vector<double> eps_grid() const;
};

// Assembled forms, homogenised tensors and provenance shared by all experiments.
struct Model {
    std::unique_ptr<AssembledForms> forms;
    RodTensor rod;
    Mat4 C_rod = Mat4::Identity();  // diag(I, C_stretch) from the cross-section mass
    MomentData moments;
    std::string mesh_hash;
    std::string material_hash;

    const AssembledForms& f() const { return *forms; }
};

Model build_model(const ExperimentConfig& cfg);
Model build_model(const MaterialProfile& profile, const ProductMesh& mesh);

// Unit-norm load family shared by all eps: fibers |k| <= load_band carry seeded
// smooth profiles that do not depend on N.
FiberBundle make_load(const Model& model, const ExperimentConfig& cfg, int N, int index);

// Load seen by a regime: bend scaling (S_{eps^delta} or S_inf) and projection
// onto the invariant subspace of the stretch and bend regimes.
FiberBundle regime_load(const Model& model, const ExperimentConfig& cfg, const FiberBundle& f,
                        RodRegime regime);

// Homogenised resolvent on the line through the Fourier symbol of the limit
// operator, with the flags of cfg.
LineField limit_resolvent(const Model& model, const ExperimentConfig& cfg, double eps,
                          const LineField& f, RodRegime regime);

// (eps^{-gamma} A_eps + I)^{-1} f through fiberwise solves at t = eps^{-(gamma + 2)}.
FiberBundle reference_bundle(const Model& model, const ExperimentConfig& cfg,
                             const FiberBundle& f);
LineField reference_resolvent(const Model& model, const ExperimentConfig& cfg, double eps,
                              const LineField& f);

// Fiberwise approximant of the given order; the load is used as given.
FiberBundle fiberwise_approximant(const Model& model, const ExperimentConfig& cfg,
                                  const FiberBundle& f, RodRegime regime, int order,
                                  double* max_kernel_residual = nullptr);

// Max relative difference between limit_resolvent and the inverse Gelfand
// transform of the fiberwise order-0 approximant, over regimes and loads.
double line_fiber_consistency(const Model& model, const ExperimentConfig& cfg, int N);

double theory_slope(int order, RodRegime regime, Component comp, double gamma, double delta,
                    const ExperimentFlags& flags);
double slope_threshold(double theory, double margin);

struct RateEntry {
    std::string regime;
    std::string component;
    int order = 0;
    std::string flags;
    std::string norm;
    std::vector<double> eps;
    std::vector<double> err;
    double slope_fit = 0.0;
    double slope_theory = 0.0;
    double threshold = 0.0;
    bool conclusive = true;
    bool pass = false;
};

struct RateReport {
    std::string name;
    std::vector<RateEntry> entries;
    double max_kernel_residual = 0.0;
    double seconds = 0.0;

    bool all_pass() const;
};

RateReport rate_experiment(const Model& model, const ExperimentConfig& cfg);
// Xi removal, leading bend momentum and the S_inf load, each against its own rate.
RateReport ablation_experiment(const Model& model, const ExperimentConfig& cfg);

// Fills slope, threshold and pass of an entry from its data.
void finalise_entry(RateEntry& e, double margin, double floor);

extern const char* const kMaxOverLoadsNote;

nlohmann::json provenance(const Model& model, const ExperimentConfig& cfg);
nlohmann::json to_json(const RateReport& r);
void write_rates_csv(const std::vector<RateReport>& reports, const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

// Fiber-level study rows and slopes in the fiber_rates.csv layout.
void write_fiber_rates_csv(const std::vector<FiberRateStudy>& studies,
                           const std::filesystem::path& path);

nlohmann::json homogenized_json(const Model& model);

}  // namespace rodhom
