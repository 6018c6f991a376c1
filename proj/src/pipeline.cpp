#include "rodhom/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

namespace rodhom {

const char* const kMaxOverLoadsNote =
    "operator-norm estimates are verified in the weaker max-over-loads sense: each error is the "
    "worst case over a fixed seeded load family";

namespace {

using json = nlohmann::json;

std::vector<int> regime_indices(RodRegime r) {
    switch (r) {
        case RodRegime::Stretch: return {2, 3};
        case RodRegime::Bend: return {0, 1};
        case RodRegime::General:
        default: return {0, 1, 2, 3};
    }
}

Regime chain_regime(RodRegime r) {
    switch (r) {
        case RodRegime::Stretch: return Regime::Stretch;
        case RodRegime::Bend: return Regime::Bend;
        case RodRegime::General:
        default: return Regime::General4;
    }
}

std::vector<Component> natural_components(RodRegime r) {
    if (r == RodRegime::Stretch) return {Component::All};
    return {Component::InPlane, Component::Axial};
}

std::vector<Component> selected_components(const ExperimentConfig& cfg, RodRegime r) {
    if (cfg.components.empty()) return natural_components(r);
    return cfg.components;
}

Scaling regime_scaling(const ExperimentConfig& cfg, double eps, RodRegime r) {
    if (r != RodRegime::Bend || cfg.flags.m0) return Scaling::none();
    return cfg.flags.s_inf ? Scaling::infinity() : Scaling::eps_delta(eps, cfg.delta);
}

std::uint64_t load_seed(std::uint64_t seed, int index, int k) {
    std::uint64_t h = seed * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(index + 1) * 0xBF58476D1CE4E5B9ull;
    h ^= static_cast<std::uint64_t>(k + 1024) * 0x94D049BB133111EBull;
    return h;
}

double prefactor(const ExperimentConfig& cfg, double eps) { return std::pow(eps, -(cfg.gamma + 2.0)); }

bool line_path(const ExperimentFlags& f) { return !f.xi || f.m0; }

// Squared physical H1 norm of one fiber of a bundle.
double fiber_h1_sq(const Model& model, const FiberBundle& like, std::size_t i, const CVec& v) {
    FiberBundle one;
    one.N = like.N;
    one.n_y = like.n_y;
    one.eps = like.eps;
    one.n2 = like.n2;
    one.k = {like.k[i]};
    one.chi = {like.chi[i]};
    one.fibers = {v};
    const double n = bundle_h1_norm(one, model.f().M2(), model.f().K2());
    return n * n;
}

double fiber_l2_sq(const Model& model, const CVec& v) {
    const double n = l2_norm(model.f(), v);
    return n * n;
}

bool active(const CVec& v) { return v.size() > 0 && v.cwiseAbs().maxCoeff() > 0.0; }

FiberBundle empty_like(const FiberBundle& b) {
    FiberBundle out = b;
    for (auto& v : out.fibers) v = CVec::Zero(v.size());
    return out;
}

// Per-fiber solver state reused across loads and regimes.
struct FiberWork {
    FiberContext ctx;
    ResolventSolver solver;
    FiberWork(const AssembledForms& forms, double chi, double t)
        : ctx(forms, chi), solver(forms, chi, t, 1.0) {}
};

CVec checked_solve(const FiberWork& w, const CVec& F, double tol) {
    const CVec rhs = w.ctx.mass(F);
    const CVec u = w.solver.solve(rhs);
    if (w.solver.residual(u, rhs) > tol)
        throw SingularSystem("reference resolvent residual above tolerance");
    return u;
}

FiberProblem fiber_problem(const ExperimentConfig& cfg, double chi, double t, RodRegime r,
                           const CVec& F) {
    FiberProblem p;
    p.chi = chi;
    p.t = t;
    p.c = 1.0;
    p.regime = chain_regime(r);
    p.f = F;
    p.scaling = Scaling::none();
    p.bend_identity = true;
    (void)cfg;
    return p;
}

CVec chain_approximant(const FiberContext& ctx, const FiberProblem& p, RodRegime r, int order,
                       double* kernel) {
    const bool leading = order < 2 || r == RodRegime::General;
    const ApproximationChain chain = build_chain(ctx, p, leading);
    if (kernel) *kernel = std::max(*kernel, chain.max_kernel_residual());
    return chain.eps_approximant(order);
}

std::string component_name(Component c) { return to_string(c); }

json double_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

std::string to_string(RodRegime r) {
    switch (r) {
        case RodRegime::General: return "general";
        case RodRegime::Stretch: return "stretch";
        case RodRegime::Bend: return "bend";
    }
    return "unknown";
}

RodRegime rod_regime_from_string(const std::string& s) {
    if (s == "general" || s == "rod") return RodRegime::General;
    if (s == "stretch") return RodRegime::Stretch;
    if (s == "bend") return RodRegime::Bend;
    throw InvalidArgument("unknown rod regime '" + s + "'");
}

Component component_from_string(const std::string& s) {
    if (s == "all") return Component::All;
    if (s == "i12" || s == "inplane") return Component::InPlane;
    if (s == "i3" || s == "axial") return Component::Axial;
    throw InvalidArgument("unknown component '" + s + "'");
}

std::string ExperimentFlags::label() const {
    std::string s = xi ? "xi" : "no-xi";
    s += m0 ? ";M0" : ";M_eps";
    s += s_inf ? ";S_inf" : ";S_eps^delta";
    return s;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.material = material_to_json(two_phase_profile(5.0));
    c.geometry = geometry_to_json(8, 8, 1.0, 8);
    return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    static const std::set<std::string> known{
        "material", "geometry", "gamma", "delta", "L", "N_grid", "regimes", "components",
        "order", "flags", "loads", "load_band", "seed", "margin", "error_floor", "residual_tol",
        "kernel_tol", "chi_grid", "fiber_regimes", "fiber_loads", "contour"};
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
    ExperimentConfig c = defaults();
    if (j.contains("material")) {
        const json& m = j["material"];
        if (m.contains("preset")) {
            const std::string preset = m["preset"].get<std::string>();
            if (preset == "two_phase") {
                c.material = material_to_json(two_phase_profile(m.value("contrast", 5.0)));
            } else if (preset == "homogeneous") {
                c.material = material_to_json(homogeneous_profile(
                    make_isotropic(m.value("lambda", 1.0), m.value("mu", 1.0))));
            } else {
                throw InvalidArgument("unknown material preset '" + preset + "'");
            }
        } else {
            c.material = m;
        }
    }
    if (j.contains("geometry")) c.geometry = j["geometry"];
    c.gamma = j.value("gamma", c.gamma);
    c.delta = j.value("delta", c.delta);
    c.L = j.value("L", c.L);
    if (j.contains("N_grid")) c.N_grid = j["N_grid"].get<std::vector<int>>();
    if (j.contains("regimes")) {
        c.regimes.clear();
        for (const auto& r : j["regimes"]) c.regimes.push_back(rod_regime_from_string(r));
    }
    if (j.contains("components")) {
        c.components.clear();
        for (const auto& s : j["components"]) c.components.push_back(component_from_string(s));
    }
    c.order = j.value("order", c.order);
    if (j.contains("flags")) {
        const json& f = j["flags"];
        c.flags.xi = f.value("xi", c.flags.xi);
        c.flags.m0 = f.value("m0", c.flags.m0);
        c.flags.s_inf = f.value("s_inf", c.flags.s_inf);
    }
    c.loads = j.value("loads", c.loads);
    c.load_band = j.value("load_band", c.load_band);
    c.seed = j.value("seed", c.seed);
    c.margin = j.value("margin", c.margin);
    c.error_floor = j.value("error_floor", c.error_floor);
    c.residual_tol = j.value("residual_tol", c.residual_tol);
    c.kernel_tol = j.value("kernel_tol", c.kernel_tol);
    if (j.contains("chi_grid")) c.chi_grid = j["chi_grid"].get<std::vector<double>>();
    if (j.contains("fiber_regimes")) {
        c.fiber_regimes.clear();
        for (const auto& r : j["fiber_regimes"]) c.fiber_regimes.push_back(regime_from_string(r));
    }
    c.fiber_loads = j.value("fiber_loads", c.fiber_loads);
    if (j.contains("contour")) {
        const json& ct = j["contour"];
        if (ct.contains("chis")) c.contour_chis = ct["chis"].get<std::vector<double>>();
        c.contour_eps = ct.value("eps", c.contour_eps);
        c.contour_nodes = ct.value("nodes", c.contour_nodes);
    }
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    json regs = json::array(), comps = json::array(), fregs = json::array();
    for (auto r : regimes) regs.push_back(rodhom::to_string(r));
    for (auto cp : components) comps.push_back(rodhom::to_string(cp));
    for (auto r : fiber_regimes) fregs.push_back(rodhom::to_string(r));
    return {{"material", material},
            {"geometry", geometry},
            {"gamma", gamma},
            {"delta", delta},
            {"L", L},
            {"N_grid", N_grid},
            {"regimes", regs},
            {"components", comps},
            {"order", order},
            {"flags", {{"xi", flags.xi}, {"m0", flags.m0}, {"s_inf", flags.s_inf}}},
            {"loads", loads},
            {"load_band", load_band},
            {"seed", seed},
            {"margin", margin},
            {"error_floor", error_floor},
            {"residual_tol", residual_tol},
            {"kernel_tol", kernel_tol},
            {"chi_grid", chi_grid},
            {"fiber_regimes", fregs},
            {"fiber_loads", fiber_loads},
            {"contour", {{"chis", contour_chis}, {"eps", contour_eps}, {"nodes", contour_nodes}}}};
}

void ExperimentConfig::validate() const {
    if (!(gamma > -2.0)) throw InvalidArgument("gamma must exceed -2");
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
    if (!(L > 0.0)) throw InvalidArgument("box length must be positive");
    if (N_grid.size() < 4) throw InvalidArgument("eps grid needs at least 4 points");
    if (load_band < 0) throw InvalidArgument("load band must be nonnegative");
    for (int N : N_grid)
        if (N < 2 * load_band + 2) throw InvalidArgument("N too small for the load band");
    if (order < 0 || order > 2) throw InvalidArgument("order must be 0, 1 or 2");
    if (regimes.empty()) throw InvalidArgument("no regimes selected");
    if (order == 2)
        for (auto r : regimes)
            if (r == RodRegime::General)
                throw InvalidArgument("order 2 is available for the stretch and bend regimes");
    if (line_path(flags) && order != 0)
        throw InvalidArgument("the Xi and M0 ablations are defined for order 0");
    if (loads < 1) throw InvalidArgument("need at least one load");
    if (!(margin >= 0.0)) throw InvalidArgument("margin must be nonnegative");
}

std::vector<double> ExperimentConfig::eps_grid() const {
    std::vector<double> e;
    for (int N : N_grid) e.push_back(L / N);
    return e;
}

Model build_model(const MaterialProfile& profile, const ProductMesh& mesh) {
    Model m;
    m.forms = std::make_unique<AssembledForms>(profile, mesh);
    m.rod = rod_tensor(*m.forms);
    const auto& section = mesh.section;
    const int n2 = mesh.n2();
    Vec one = Vec::Ones(n2), x1(n2), x2(n2);
    for (int a = 0; a < n2; ++a) {
        x1(a) = section.nodes[a].x();
        x2(a) = section.nodes[a].y();
    }
    const SpMat& M2 = m.forms->M2();
    m.C_rod = Mat4::Identity();
    m.C_rod(2, 2) = x1.dot(M2 * x1) + x2.dot(M2 * x2);
    m.C_rod(3, 3) = one.dot(M2 * one);
    m.moments = compute_moments(section, 0.0);
    m.mesh_hash = mesh_hash(mesh);
    m.material_hash = material_hash(profile);
    return m;
}

Model build_model(const ExperimentConfig& cfg) {
    return build_model(material_from_json(cfg.material), geometry_from_json(cfg.geometry));
}

FiberBundle make_load(const Model& model, const ExperimentConfig& cfg, int N, int index) {
    const auto& forms = model.f();
    FiberBundle b;
    b.N = N;
    b.n_y = forms.mesh().n_y;
    b.eps = cfg.L / N;
    b.n2 = forms.mesh().n2();
    b.k = fiber_indices(N);
    const double w = 1.0 / std::sqrt(2.0 * cfg.load_band + 1.0);
    for (int k : b.k) {
        b.chi.push_back(2.0 * M_PI * k / N);
        if (std::abs(k) <= cfg.load_band)
            b.fibers.push_back(w * random_smooth_load(forms, load_seed(cfg.seed, index, k)));
        else
            b.fibers.emplace_back(CVec::Zero(forms.num_dofs()));
    }
    return b;
}

FiberBundle regime_load(const Model& model, const ExperimentConfig& cfg, const FiberBundle& f,
                        RodRegime regime) {
    FiberBundle out = f;
    if (regime == RodRegime::General) return out;
    const auto& forms = model.f();
    if (!forms.profile().satisfies_rod_symmetry())
        throw InvalidArgument("stretch and bend regimes need a symmetric material");
    const SymmetryInfo sym = is_centrally_symmetric(forms.mesh().section);
    if (!sym.symmetric) throw InvalidArgument("stretch and bend regimes need a symmetric section");
    const Scaling s = regime_scaling(cfg, f.eps, regime);
    const Which which = regime == RodRegime::Bend ? Which::Bend : Which::Stretch;
    for (auto& v : out.fibers)
        if (active(v)) v = project_symmetry(forms, apply_scaling(v, s), which, sym.pairing);
    return out;
}

LineField limit_resolvent(const Model& model, const ExperimentConfig& cfg, double eps,
                          const LineField& f, RodRegime regime) {
    if (std::abs(f.eps - eps) > 1e-14 * eps) throw AlignmentError("line field eps mismatch");
    const auto& forms = model.f();
    const auto& section = forms.mesh().section;
    const bool m0 = cfg.flags.m0;
    const LineMoments mom = momentum_real(f, Which::Rod, section, forms.M2(), m0);
    const int S = f.slabs();
    const CMat hat = fft_rows(mom.values, false);
    CMat sol = CMat::Zero(4, S);
    const std::vector<int> idx = regime_indices(regime);
    const int n = static_cast<int>(idx.size());
    const CMat4 A = model.rod.A_rod.cast<cplx>();
    const double scale = std::pow(eps, -cfg.gamma);
    for (int q = 0; q < S; ++q) {
        const int qc = centred_index(q, S);
        if (cfg.flags.xi && (qc < -(f.N / 2) || qc >= f.N - f.N / 2)) continue;
        const double theta = 2.0 * M_PI * qc / f.L();
        const CMat4 D = scaling_matrix(eps * theta) / eps;
        const CMat4 sym = scale * (D.adjoint() * A * D);
        CMat a(n, n);
        CVec b(n);
        for (int i = 0; i < n; ++i) {
            b(i) = hat(idx[i], q);
            for (int j = 0; j < n; ++j) a(i, j) = sym(idx[i], idx[j]) + model.C_rod(idx[i], idx[j]);
        }
        const CVec x = a.partialPivLu().solve(b);
        for (int i = 0; i < n; ++i) sol(idx[i], q) = x(i);
    }
    LineMoments m;
    m.which = Which::Rod;
    m.values = fft_rows(sol, true);
    return momentum_adjoint(m, f, section, m0);
}

FiberBundle reference_bundle(const Model& model, const ExperimentConfig& cfg,
                             const FiberBundle& f) {
    FiberBundle out = empty_like(f);
    const double t = prefactor(cfg, f.eps);
    for (std::size_t i = 0; i < f.fibers.size(); ++i) {
        if (!active(f.fibers[i])) continue;
        const FiberWork w(model.f(), f.chi[i], t);
        out.fibers[i] = checked_solve(w, f.fibers[i], cfg.residual_tol);
    }
    return out;
}

LineField reference_resolvent(const Model& model, const ExperimentConfig& cfg, double eps,
                              const LineField& f) {
    if (std::abs(f.eps - eps) > 1e-14 * eps) throw AlignmentError("line field eps mismatch");
    FiberBundle b = gelfand(f);
    const double total = bundle_l2_norm(b, model.f().M2());
    for (auto& v : b.fibers)
        if (l2_norm(model.f(), v) <= 1e-14 * total) v.setZero();
    return gelfand_inverse(reference_bundle(model, cfg, b));
}

FiberBundle fiberwise_approximant(const Model& model, const ExperimentConfig& cfg,
                                  const FiberBundle& f, RodRegime regime, int order,
                                  double* max_kernel_residual) {
    FiberBundle out = empty_like(f);
    const double t = prefactor(cfg, f.eps);
    for (std::size_t i = 0; i < f.fibers.size(); ++i) {
        if (!active(f.fibers[i])) continue;
        const FiberContext ctx(model.f(), f.chi[i]);
        const FiberProblem p = fiber_problem(cfg, f.chi[i], t, regime, f.fibers[i]);
        out.fibers[i] = chain_approximant(ctx, p, regime, order, max_kernel_residual);
    }
    return out;
}

double line_fiber_consistency(const Model& model, const ExperimentConfig& cfg, int N) {
    ExperimentConfig c = cfg;
    c.flags = ExperimentFlags{};
    double worst = 0.0;
    for (RodRegime r : cfg.regimes)
        for (int l = 0; l < cfg.loads; ++l) {
            const FiberBundle F = regime_load(model, c, make_load(model, c, N, l), r);
            const LineField line = limit_resolvent(model, c, F.eps, gelfand_inverse(F), r);
            const LineField fib = gelfand_inverse(fiberwise_approximant(model, c, F, r, 0));
            const double scale = std::max(line.values.cwiseAbs().maxCoeff(), 1e-300);
            worst = std::max(worst, max_abs_diff(line, fib) / scale);
        }
    return worst;
}

double theory_slope(int order, RodRegime regime, Component comp, double gamma, double delta,
                    const ExperimentFlags& flags) {
    const double a = (gamma + 2.0) / 4.0, b = (gamma + 2.0) / 2.0;
    const bool axial = comp == Component::Axial;
    const double bend_factor = flags.s_inf ? 0.0 : std::min(0.0, a - delta);
    if (order == 0) {
        if (regime == RodRegime::Stretch) return b;
        if (regime == RodRegime::Bend) {
            if (flags.m0) return a;
            return (axial ? b : a) + bend_factor;
        }
        return axial ? b : a;
    }
    if (order == 1) {
        if (regime == RodRegime::Stretch) return std::min(gamma + 1.0, b);
        if (regime == RodRegime::Bend)
            return bend_factor + (axial ? std::min(b, (3.0 * gamma + 2.0) / 4.0)
                                        : std::min(a, gamma / 2.0));
        return axial ? b : a;
    }
    if (regime == RodRegime::Stretch) return gamma + 2.0;
    const double base = axial ? 3.0 * (gamma + 2.0) / 4.0 : b;
    return regime == RodRegime::Bend ? base + bend_factor : base;
}

double slope_threshold(double theory, double margin) {
    return theory - std::max(margin, margin * theory);
}

bool RateReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const RateEntry& e) { return e.pass; });
}

void finalise_entry(RateEntry& e, double margin, double floor) {
    e.threshold = slope_threshold(e.slope_theory, margin);
    e.conclusive = std::all_of(e.err.begin(), e.err.end(), [&](double x) { return x > floor; });
    if (!e.conclusive) {
        e.slope_fit = std::nan("");
        e.pass = false;
        return;
    }
    e.slope_fit = fit_slope(e.eps, e.err);
    e.pass = e.slope_fit >= e.threshold;
}

RateReport rate_experiment(const Model& model, const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RateReport rep;
    rep.name = cfg.order == 0 ? "resolvent-rates" : cfg.order == 1 ? "h1-rates" : "higher-order-rates";
    const bool h1 = cfg.order == 1;
    const bool via_line = line_path(cfg.flags);
    const int R = static_cast<int>(cfg.regimes.size());
    std::vector<std::vector<Component>> comps(R);
    std::vector<std::vector<RateEntry>> entries(R);
    for (int r = 0; r < R; ++r) {
        comps[r] = selected_components(cfg, cfg.regimes[r]);
        for (Component c : comps[r]) {
            RateEntry e;
            e.regime = to_string(cfg.regimes[r]);
            e.component = component_name(c);
            e.order = cfg.order;
            e.flags = fmt::format("{};gamma={};delta={}", cfg.flags.label(), cfg.gamma, cfg.delta);
            e.norm = h1 ? "H1" : "L2";
            e.slope_theory =
                theory_slope(cfg.order, cfg.regimes[r], c, cfg.gamma, cfg.delta, cfg.flags);
            entries[r].push_back(e);
        }
    }
    for (int N : cfg.N_grid) {
        const double eps = cfg.L / N;
        const double t = prefactor(cfg, eps);
        // loads[r][l]: prepared loads; refs and approximants on the same bundles.
        std::vector<std::vector<FiberBundle>> loads(R), refs(R), approx(R);
        for (int r = 0; r < R; ++r)
            for (int l = 0; l < cfg.loads; ++l) {
                loads[r].push_back(regime_load(model, cfg, make_load(model, cfg, N, l), cfg.regimes[r]));
                refs[r].push_back(empty_like(loads[r].back()));
                approx[r].push_back(empty_like(loads[r].back()));
            }
        const FiberBundle& shape = loads[0][0];
        for (std::size_t i = 0; i < shape.fibers.size(); ++i) {
            bool any = false;
            for (int r = 0; r < R; ++r)
                for (int l = 0; l < cfg.loads; ++l) any = any || active(loads[r][l].fibers[i]);
            if (!any) continue;
            const FiberWork w(model.f(), shape.chi[i], t);
            for (int r = 0; r < R; ++r)
                for (int l = 0; l < cfg.loads; ++l) {
                    const CVec& F = loads[r][l].fibers[i];
                    if (!active(F)) continue;
                    refs[r][l].fibers[i] = checked_solve(w, F, cfg.residual_tol);
                    if (via_line) continue;
                    const FiberProblem p = fiber_problem(cfg, shape.chi[i], t, cfg.regimes[r], F);
                    approx[r][l].fibers[i] = chain_approximant(w.ctx, p, cfg.regimes[r], cfg.order,
                                                               &rep.max_kernel_residual);
                }
        }
        for (int r = 0; r < R; ++r) {
            std::vector<double> worst(comps[r].size(), 0.0);
            for (int l = 0; l < cfg.loads; ++l) {
                if (via_line)
                    approx[r][l] = gelfand(limit_resolvent(model, cfg, eps,
                                                           gelfand_inverse(loads[r][l]),
                                                           cfg.regimes[r]));
                for (std::size_t c = 0; c < comps[r].size(); ++c) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < shape.fibers.size(); ++i) {
                        const CVec e = mask_components(refs[r][l].fibers[i] - approx[r][l].fibers[i],
                                                       comps[r][c]);
                        s += h1 ? fiber_h1_sq(model, shape, i, e) : fiber_l2_sq(model, e);
                    }
                    worst[c] = std::max(worst[c], std::sqrt(s));
                }
            }
            for (std::size_t c = 0; c < comps[r].size(); ++c) {
                entries[r][c].eps.push_back(eps);
                entries[r][c].err.push_back(worst[c]);
            }
        }
    }
    for (int r = 0; r < R; ++r)
        for (auto& e : entries[r]) {
            finalise_entry(e, cfg.margin, cfg.error_floor);
            rep.entries.push_back(e);
        }
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

RateReport ablation_experiment(const Model& model, const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RateReport rep;
    rep.name = "ablation";
    ExperimentConfig base = cfg;
    base.order = 0;
    base.flags = ExperimentFlags{};

    // Xi removal: difference of the two limit approximants, with the S_inf load
    // in the bend regime.
    for (RodRegime r : cfg.regimes) {
        ExperimentConfig with_xi = base;
        with_xi.flags.s_inf = r == RodRegime::Bend;
        ExperimentConfig no_xi = with_xi;
        no_xi.flags.xi = false;
        const std::vector<Component> comps = selected_components(cfg, r);
        std::vector<RateEntry> es;
        for (Component c : comps) {
            RateEntry e;
            e.regime = to_string(r);
            e.component = component_name(c);
            e.order = 0;
            e.flags = fmt::format("xi-difference;{};gamma={};delta={}",
                                  r == RodRegime::Bend ? "S_inf" : "S_eps^delta", cfg.gamma,
                                  cfg.delta);
            e.norm = "L2";
            e.slope_theory = cfg.gamma + 2.0;
            es.push_back(e);
        }
        for (int N : cfg.N_grid) {
            const double eps = cfg.L / N;
            std::vector<double> worst(comps.size(), 0.0);
            for (int l = 0; l < cfg.loads; ++l) {
                const LineField F = gelfand_inverse(
                    regime_load(model, with_xi, make_load(model, with_xi, N, l), r));
                const FiberBundle d = gelfand(limit_resolvent(model, with_xi, eps, F, r));
                const FiberBundle dn = gelfand(limit_resolvent(model, no_xi, eps, F, r));
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < d.fibers.size(); ++i)
                        s += fiber_l2_sq(model, mask_components(d.fibers[i] - dn.fibers[i], comps[c]));
                    worst[c] = std::max(worst[c], std::sqrt(s));
                }
            }
            for (std::size_t c = 0; c < comps.size(); ++c) {
                es[c].eps.push_back(eps);
                es[c].err.push_back(worst[c]);
            }
        }
        for (auto& e : es) {
            finalise_entry(e, cfg.margin, cfg.error_floor);
            rep.entries.push_back(e);
        }
    }

    const bool has_bend =
        std::find(cfg.regimes.begin(), cfg.regimes.end(), RodRegime::Bend) != cfg.regimes.end();
    if (has_bend) {
        ExperimentConfig m0 = base;
        m0.regimes = {RodRegime::Bend};
        m0.flags.m0 = true;
        m0.flags.xi = false;
        const RateReport a = rate_experiment(model, m0);
        ExperimentConfig sinf = base;
        sinf.regimes = {RodRegime::Bend};
        sinf.flags.s_inf = true;
        const RateReport b = rate_experiment(model, sinf);
        for (const auto* part : {&a, &b}) {
            rep.entries.insert(rep.entries.end(), part->entries.begin(), part->entries.end());
            rep.max_kernel_residual = std::max(rep.max_kernel_residual, part->max_kernel_residual);
        }
    }
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

json provenance(const Model& model, const ExperimentConfig& cfg) {
    return {{"mesh_hash", model.mesh_hash},
            {"material_hash", model.material_hash},
            {"seed", cfg.seed},
            {"eps_grid", double_array(cfg.eps_grid())},
            {"load_family",
             {{"count", cfg.loads},
              {"fiber_band", cfg.load_band},
              {"profile", "polynomials of degree <= 2 in x times y-modes |q| <= 2, unit L2"}}},
            {"xi_band", "box frequencies -floor(N/2) .. ceil(N/2)-1 (half-open)"},
            {"tolerances",
             {{"slope_margin", cfg.margin},
              {"threshold_rule", "theory - max(margin, margin * theory)"},
              {"error_floor", cfg.error_floor},
              {"reference_residual", cfg.residual_tol},
              {"kernel_residual", cfg.kernel_tol}}},
            {"note", kMaxOverLoadsNote},
            {"config", cfg.to_json()}};
}

json to_json(const RateReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"regime", e.regime},
                           {"component", e.component},
                           {"order", e.order},
                           {"flags", e.flags},
                           {"norm", e.norm},
                           {"eps", double_array(e.eps)},
                           {"err", double_array(e.err)},
                           {"slope_fit", std::isnan(e.slope_fit) ? json(nullptr) : json(e.slope_fit)},
                           {"slope_theory", e.slope_theory},
                           {"threshold", e.threshold},
                           {"status", e.conclusive ? (e.pass ? "pass" : "fail") : "NON-CONCLUSIVE"},
                           {"pass", e.pass}});
    return {{"name", r.name},
            {"entries", entries},
            {"max_kernel_residual", r.max_kernel_residual},
            {"seconds", r.seconds},
            {"all_pass", r.all_pass()}};
}

void write_rates_csv(const std::vector<RateReport>& reports, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "# " << kMaxOverLoadsNote << "\n";
    out << "regime,component,order,flags,eps,err,slope_fit,slope_theory,pass\n";
    for (const auto& r : reports)
        for (const auto& e : r.entries) {
            const std::string status = e.conclusive ? (e.pass ? "true" : "false") : "NON-CONCLUSIVE";
            for (std::size_t i = 0; i < e.eps.size(); ++i)
                out << fmt::format("{},{},{},{},{:.10g},{:.10e},{:.6f},{:.6f},{}\n", e.regime,
                                   e.component, e.order, e.flags, e.eps[i], e.err[i], e.slope_fit,
                                   e.slope_theory, status);
        }
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_fiber_rates_csv(const std::vector<FiberRateStudy>& studies,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "# " << kMaxOverLoadsNote << "\n";
    out << "regime,chi,component,order,err_l2,err_h1\n";
    for (const auto& s : studies)
        for (const auto& row : s.rows)
            out << fmt::format("{},{:.10g},{},{},{:.10e},{:.10e}\n", to_string(s.regime), row.chi,
                               to_string(row.component), row.order, row.err_l2, row.err_h1);
    out << "# slopes\n";
    for (const auto& s : studies)
        for (const auto& sl : s.slopes)
            out << fmt::format("{},slope,{},{},{:.6f},{:.6f}\n", to_string(s.regime),
                               to_string(sl.component), sl.order, sl.slope_l2, sl.slope_h1);
}

json homogenized_json(const Model& model) {
    const RodTensor& rod = model.rod;
    auto mat = [](const auto& m) {
        json a = json::array();
        for (int i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            a.push_back(row);
        }
        return a;
    };
    return {{"A_rod", mat(rod.A_rod)},
            {"A_bend", mat(rod.A_bend)},
            {"A_stretch", mat(rod.A_stretch)},
            {"eta", rod.eta},
            {"c1", model.moments.c1},
            {"c2", model.moments.c2},
            {"symmetry_residual", rod.symmetry_residual},
            {"coupling", rod.coupling}};
}

}  // namespace rodhom
