#include "rodhom/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace rodhom {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

LineField random_line_field(int N, int n_y, double eps, int n2, std::uint64_t seed) {
    LineField f = make_line_field(N, n_y, eps, n2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    for (Eigen::Index i = 0; i < f.values.rows(); ++i)
        for (Eigen::Index j = 0; j < f.values.cols(); ++j) f.values(i, j) = cplx(d(rng), d(rng));
    return f;
}

// L2 inner product on omega x box, conjugate-linear in the first argument.
cplx line_inner(const LineField& f, const LineField& g, const SpMat& M2) {
    cplx s = 0.0;
    for (int col = 0; col < f.slabs(); ++col)
        for (int c = 0; c < 3; ++c) {
            CVec u(f.n2), v(f.n2);
            for (int a = 0; a < f.n2; ++a) {
                u(a) = f.values(3 * a + c, col);
                v(a) = g.values(3 * a + c, col);
            }
            s += u.dot(M2 * v);
        }
    return s * f.eps / static_cast<double>(f.n_y);
}

double relative(double diff, double scale) { return diff / std::max(scale, 1e-300); }

double ratio_spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo - 1.0;
}

template <class F>
CriterionResult evaluate(int id, std::string title, double time_limit, F&& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    r.time_limit = time_limit;
    const auto t0 = Clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    if (r.seconds == 0.0) r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

Check make_check(std::string name, double value, std::string relation, double limit) {
    Check c{std::move(name), value, std::move(relation), limit, false};
    if (c.relation == "<=") c.pass = value <= limit;
    else if (c.relation == "<") c.pass = value < limit;
    else if (c.relation == ">=") c.pass = value >= limit;
    else if (c.relation == ">") c.pass = value > limit;
    else throw InvalidArgument("unknown check relation " + c.relation);
    if (!std::isfinite(value)) c.pass = false;
    return c;
}

bool CriterionResult::pass() const {
    if (!error.empty() || checks.empty()) return false;
    if (time_limit > 0.0 && seconds >= time_limit) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string CriterionResult::summary() const {
    std::string detail;
    if (!error.empty()) detail = "error: " + error;
    else if (checks.empty()) detail = "no checks";
    else {
        const auto bad = std::find_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; });
        const Check& c = bad != checks.end() ? *bad : checks.front();
        detail = fmt::format("{} checks, {}{}: {:.4g} {} {:.4g}", checks.size(),
                             bad != checks.end() ? "first failing " : "e.g. ", c.name, c.value,
                             c.relation, c.limit);
    }
    const std::string timing =
        time_limit > 0.0 ? fmt::format("{:.1f}s < {:.0f}s", seconds, time_limit)
                         : fmt::format("{:.1f}s", seconds);
    return fmt::format("criterion {:>2} {:<4} {} [{}] ({})", id, pass() ? "PASS" : "FAIL", title,
                       timing, detail);
}

json to_json(const CriterionResult& c) {
    json checks = json::array();
    for (const auto& k : c.checks)
        checks.push_back({{"name", k.name},
                          {"value", k.value},
                          {"relation", k.relation},
                          {"limit", k.limit},
                          {"pass", k.pass}});
    json j{{"id", c.id},
           {"title", c.title},
           {"pass", c.pass()},
           {"seconds", c.seconds},
           {"time_limit", c.time_limit},
           {"checks", checks}};
    if (!c.error.empty()) j["error"] = c.error;
    return j;
}

double saint_venant_torsion(double aspect, int terms) {
    if (!(aspect > 0.0)) throw InvalidArgument("aspect must be positive");
    double a = std::sqrt(aspect), b = 1.0 / std::sqrt(aspect);
    if (a < b) std::swap(a, b);
    double sum = 0.0;
    for (int n = 1; n <= 2 * terms; n += 2)
        sum += std::tanh(n * M_PI * a / (2.0 * b)) / std::pow(n, 5);
    return a * b * b * b / 3.0 * (1.0 - 192.0 * b / (std::pow(M_PI, 5) * a) * sum);
}

CriterionResult tensor_sanity(const Model& model, int id) {
    return evaluate(id, "homogenised tensor sanity", 60.0, [&](CriterionResult& r) {
        const RodTensor& t = model.rod;
        r.checks.push_back(make_check("A_rod symmetry residual", t.symmetry_residual, "<=", 1e-10));
        r.checks.push_back(make_check("A_rod smallest eigenvalue", t.eta, ">", 0.0));
        if (model.f().profile().satisfies_rod_symmetry())
            r.checks.push_back(make_check("bend/stretch coupling", t.coupling, "<=", 1e-8));
    });
}

CriterionResult classical_limits(int nx, int ny, int n_y, int id) {
    return evaluate(id, "classical limits", 120.0, [&](CriterionResult& r) {
        const ProductMesh mesh = make_product_mesh(build_rectangle(1.0, nx, ny), n_y);
        const RodTensor t = rod_tensor(homogeneous_profile(make_isotropic(1.0, 1.0)), mesh);
        const double E = 2.5;
        const double I = 1.0 / 12.0;
        const double J = saint_venant_torsion(1.0);
        r.checks.push_back(
            make_check("A_stretch axial relative error", std::abs(t.A_stretch(1, 1) - E) / E, "<=", 0.02));
        for (int k = 0; k < 2; ++k)
            r.checks.push_back(make_check(fmt::format("A_bend[{}] relative error", k),
                                          std::abs(t.A_bend(k, k) - E * I) / (E * I), "<=", 0.02));
        r.checks.push_back(make_check("A_bend off-diagonal relative",
                                      std::abs(t.A_bend(0, 1)) / (E * I), "<=", 0.02));
        r.checks.push_back(make_check("A_stretch torsion vs Saint-Venant",
                                      std::abs(t.A_stretch(0, 0) - J) / J, "<=", 0.05));
    });
}

SpectrumSweep spectrum_sweep(const AssembledForms& forms, const std::vector<double>& chis) {
    SpectrumSweep s;
    s.report = spectrum_scaling(forms, chis);
    for (const auto& e : smallest_eigs(forms, 0.0, 5)) s.lambda_zero.push_back(e.value);
    return s;
}

CriterionResult spectral_scalings(const SpectrumSweep& sweep, int id) {
    return evaluate(id, "spectral scalings", 0.0, [&](CriterionResult& r) {
        const auto& rows = sweep.report.rows;
        for (int i = 0; i < 4; ++i) {
            const int p = i < 2 ? 4 : 2;
            std::vector<double> q;
            for (const auto& row : rows) q.push_back(row.lambda[i] / std::pow(row.chi, p));
            r.checks.push_back(make_check(fmt::format("lambda_{}/chi^{} spread", i + 1, p),
                                          ratio_spread(q), "<", 0.2));
        }
        std::vector<double> l5;
        for (const auto& row : rows) l5.push_back(row.lambda[4]);
        r.checks.push_back(make_check("lambda_5 max/min", ratio_spread(l5) + 1.0, "<", 2.0));
        const auto& z = sweep.lambda_zero;
        double zmax = 0.0;
        for (int i = 0; i < 4; ++i) zmax = std::max(zmax, std::abs(z[i]));
        r.checks.push_back(make_check("chi=0 four smallest eigenvalues", zmax, "<=", 1e-8));
        r.checks.push_back(make_check("chi=0 fifth eigenvalue gap", z[4] / std::max(zmax, 1e-300), ">=", 1e6));
    });
}

double fiber_slope_limit(Regime regime, Component comp, int order) {
    const bool bend_like = regime == Regime::Bend || regime == Regime::General4;
    if (bend_like && comp == Component::Axial) return order == 0 ? 1.8 : 2.6;
    return order == 0 ? 0.9 : 1.8;
}

RateReport fiber_rate_report(const std::vector<FiberRateStudy>& studies, double floor) {
    RateReport rep;
    rep.name = "fiber-rates";
    for (const auto& s : studies) {
        rep.max_kernel_residual = std::max(rep.max_kernel_residual, s.max_kernel_residual);
        for (const auto& sl : s.slopes) {
            RateEntry e;
            e.regime = to_string(s.regime);
            e.component = to_string(sl.component);
            e.order = sl.order;
            e.flags = "fiber;chi-grid";
            e.norm = "L2";
            for (const auto& row : s.rows)
                if (row.component == sl.component && row.order == sl.order) {
                    e.eps.push_back(row.chi);
                    e.err.push_back(row.err_l2);
                }
            e.slope_theory = fiber_slope_limit(s.regime, sl.component, sl.order);
            finalise_entry(e, 0.0, floor);
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

CriterionResult fiber_rates(const std::vector<FiberRateStudy>& studies, double seconds, double floor,
                            int id) {
    CriterionResult r = evaluate(id, "fiber approximation rates", 600.0, [&](CriterionResult& c) {
        for (const auto& s : studies)
            for (const auto& sl : s.slopes)
                c.checks.push_back(make_check(fmt::format("{} {} order {} L2 slope", to_string(s.regime),
                                                          to_string(sl.component), sl.order),
                                              sl.slope_l2, ">=",
                                              fiber_slope_limit(s.regime, sl.component, sl.order)));
        for (const auto& s : studies)
            for (const auto& row : s.rows)
                if (!(row.err_l2 > floor))
                    c.checks.push_back(make_check(fmt::format("{} {} order {} chi={} error above floor",
                                                              to_string(s.regime), to_string(row.component),
                                                              row.order, row.chi),
                                                  row.err_l2, ">", floor));
    });
    r.seconds = seconds;
    return r;
}

CriterionResult algebraic_identities(const Model& model, int N, double L, std::uint64_t seed,
                                     int id) {
    return evaluate(id, "exact algebraic identities", 0.0, [&](CriterionResult& r) {
        const auto& forms = model.f();
        const auto& mesh = forms.mesh();
        const SpMat& M2 = forms.M2();
        const double eps = L / N;
        const LineField f = random_line_field(N, mesh.n_y, eps, mesh.n2(), seed);
        const LineField g = random_line_field(N, mesh.n_y, eps, mesh.n2(), seed + 1);

        const FiberBundle b = gelfand(f);
        const double nf = line_l2_norm(f, M2);
        r.checks.push_back(make_check("Gelfand Parseval", relative(std::abs(bundle_l2_norm(b, M2) - nf), nf), "<=", 1e-12));
        const double fmax = f.values.cwiseAbs().maxCoeff();
        r.checks.push_back(make_check("Gelfand inversion", relative(max_abs_diff(gelfand_inverse(b), f), fmax), "<=", 1e-12));

        const LineField xf = xi_smoothing_fourier(f);
        const LineField xb = xi_smoothing_fiber(f);
        const double xmax = xf.values.cwiseAbs().maxCoeff();
        r.checks.push_back(make_check("Xi dual characterisations", relative(max_abs_diff(xf, xb), xmax), "<=", 1e-10));
        r.checks.push_back(make_check("Xi idempotent", relative(max_abs_diff(xi_smoothing_fourier(xf), xf), xmax), "<=", 1e-12));
        const cplx lhs = line_inner(xi_smoothing_fourier(f), g, M2);
        const cplx rhs = line_inner(f, xi_smoothing_fourier(g), M2);
        r.checks.push_back(make_check("Xi self-adjoint", relative(std::abs(lhs - rhs), nf * line_l2_norm(g, M2)), "<=", 1e-12));
        r.checks.push_back(make_check("Xi contraction", line_l2_norm(xf, M2) / nf, "<=", 1.0 + 1e-12));

        // Line momentum against its adjoint, both variants.
        for (bool leading : {false, true}) {
            const LineMoments m = momentum_real(g, Which::Rod, mesh.section, M2, leading);
            LineMoments d;
            d.which = Which::Rod;
            d.values = random_line_field(N, mesh.n_y, eps, 4, seed + 2).values.topRows(4);
            const LineField adj = momentum_adjoint(d, g, mesh.section, leading);
            const cplx a = line_inner(adj, g, M2);
            cplx c = 0.0;
            for (Eigen::Index s = 0; s < m.values.cols(); ++s) c += d.values.col(s).dot(m.values.col(s));
            c *= eps / mesh.n_y;
            const double scale = line_l2_norm(adj, M2) * line_l2_norm(g, M2);
            r.checks.push_back(make_check(leading ? "momentum/embedding adjointness (leading)"
                                                  : "momentum/embedding adjointness",
                                          relative(std::abs(a - c), scale), "<=", 1e-12));
        }

        // Fiber embedding: Gram matrix against the exact moments, adjointness,
        // and the fiberwise momentum against the smoothed line momentum.
        double gram = 0.0, adjoint = 0.0;
        std::vector<CVec> fm;
        std::mt19937_64 rng(seed + 3);
        std::normal_distribution<double> nd;
        for (std::size_t i = 0; i < b.fibers.size(); ++i) {
            const FiberContext ctx(forms, b.chi[i]);
            const MomentData md = compute_moments(mesh.section, b.chi[i]);
            gram = std::max(gram, (ctx.C() - md.C_rod_chi.cast<cplx>()).cwiseAbs().maxCoeff() /
                                      md.C_rod_chi.cwiseAbs().maxCoeff());
            CVec4 m;
            for (int k = 0; k < 4; ++k) m(k) = cplx(nd(rng), nd(rng));
            const CVec u = ctx.embed(m);
            const cplx lhs_f = u.dot(forms.M() * b.fibers[i]);
            const cplx rhs_f = m.dot(ctx.momentum(b.fibers[i]));
            adjoint = std::max(adjoint, std::abs(lhs_f - rhs_f) /
                                            (l2_norm(forms, u) * l2_norm(forms, b.fibers[i])));
            fm.emplace_back(ctx.momentum(b.fibers[i]));
        }
        r.checks.push_back(make_check("fiber Gram matrix vs C_rod(chi)", gram, "<=", 1e-12));
        r.checks.push_back(make_check("fiber embedding/momentum adjointness", adjoint, "<=", 1e-12));
        const LineMoments pulled = moments_from_fibers(fm, b, Which::Rod);
        const LineMoments direct = momentum_real(xf, Which::Rod, mesh.section, M2);
        r.checks.push_back(make_check("pullback of fiber momentum vs momentum of Xi f",
                                      relative((pulled.values - direct.values).cwiseAbs().maxCoeff(),
                                               direct.values.cwiseAbs().maxCoeff()),
                                      "<=", 1e-10));
    });
}

std::vector<ContourSample> contour_samples(const Model& model, const ExperimentConfig& cfg) {
    std::vector<ContourSample> out;
    const auto& forms = model.f();
    for (std::size_t i = 0; i < cfg.contour_chis.size(); ++i) {
        const double chi = cfg.contour_chis[i];
        const FiberContext ctx(forms, chi);
        const CVec f = random_smooth_load(forms, cfg.seed + 101 + i);
        for (Regime r : {Regime::Stretch, Regime::Bend})
            out.push_back({r, chi,
                           contour_quadrature_check(ctx, cfg.contour_eps, cfg.gamma, f, r,
                                                    cfg.contour_nodes, cfg.delta)});
    }
    return out;
}

CriterionResult contour_equivalence(const std::vector<ContourSample>& samples, int id) {
    return evaluate(id, "contour equivalence", 0.0, [&](CriterionResult& r) {
        for (const auto& s : samples) {
            const std::string tag = fmt::format("{} chi={}", to_string(s.regime), s.chi);
            r.checks.push_back(make_check(tag + " u0", s.report.err_u0, "<=", 1e-5));
            r.checks.push_back(make_check(tag + " u1", s.report.err_u1, "<=", 1e-5));
            r.checks.push_back(make_check(tag + " double-pole corrector", s.report.err_u0_1, "<=", 1e-5));
        }
    });
}

CriterionResult rate_criterion(int id, const std::string& title,
                               const std::vector<const RateReport*>& reports, double time_limit) {
    CriterionResult r = evaluate(id, title, time_limit, [&](CriterionResult& c) {
        for (const RateReport* rep : reports)
            for (const auto& e : rep->entries) {
                const std::string name = fmt::format("{} {} {} order {} [{}]{}", rep->name, e.regime,
                                                     e.component, e.order, e.flags,
                                                     e.conclusive ? "" : " NON-CONCLUSIVE");
                Check k = make_check(name, e.slope_fit, ">=", e.threshold);
                k.pass = k.pass && e.conclusive;
                c.checks.push_back(k);
            }
    });
    r.seconds = 0.0;
    for (const RateReport* rep : reports) r.seconds += rep->seconds;
    return r;
}

CriterionResult discrete_consistency(const Model& model, const ExperimentConfig& cfg, int N, int id) {
    return evaluate(id, "discrete consistency", 0.0, [&](CriterionResult& r) {
        r.checks.push_back(make_check("line/fiber consistency", line_fiber_consistency(model, cfg, N), "<=", 1e-10));
        const auto& forms = model.f();
        const auto& mesh = forms.mesh();
        const double eps = cfg.L / N;
        const LineField f = random_line_field(N, mesh.n_y, eps, mesh.n2(), cfg.seed + 7);
        const LineField g = random_line_field(N, mesh.n_y, eps, mesh.n2(), cfg.seed + 8);
        const LineField Rf = reference_resolvent(model, cfg, eps, f);
        const LineField Rg = reference_resolvent(model, cfg, eps, g);
        const SpMat& M2 = forms.M2();
        const cplx a = line_inner(Rf, g, M2), b = line_inner(f, Rg, M2);
        const double nf = line_l2_norm(f, M2), ng = line_l2_norm(g, M2);
        r.checks.push_back(make_check("reference resolvent self-adjointness", std::abs(a - b) / (nf * ng), "<=", 1e-10));
        r.checks.push_back(make_check("reference resolvent energy bound", line_l2_norm(Rf, M2) / nf, "<=", 1.0 + 1e-12));
    });
}

CriterionResult kernel_residuals(const std::vector<std::pair<std::string, double>>& sources,
                                 double limit, int id) {
    return evaluate(id, "corrector kernel residuals", 0.0, [&](CriterionResult& r) {
        for (const auto& [name, value] : sources)
            r.checks.push_back(make_check(name + " kernel residual / |f|", value, "<=", limit));
    });
}

}  // namespace rodhom
