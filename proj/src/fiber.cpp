#include "rodhom/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace rodhom {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Stretch: return "stretch";
        case Regime::Bend: return "bend";
        case Regime::General2: return "general2";
        case Regime::General4: return "general4";
    }
    return "unknown";
}

Regime regime_from_string(const std::string& s) {
    if (s == "stretch") return Regime::Stretch;
    if (s == "bend") return Regime::Bend;
    if (s == "general2" || s == "general_chi2") return Regime::General2;
    if (s == "general4" || s == "general_chi4") return Regime::General4;
    throw InvalidArgument("unknown regime '" + s + "'");
}

int regime_power(Regime r) { return (r == Regime::Bend || r == Regime::General4) ? 4 : 2; }

std::string to_string(Component c) {
    switch (c) {
        case Component::All: return "all";
        case Component::InPlane: return "i12";
        case Component::Axial: return "i3";
    }
    return "unknown";
}

FiberContext::FiberContext(const AssembledForms& forms, double chi)
    : forms_(forms), chi_(chi), tensor_(chi_tensor(forms, chi)) {
    const auto& mesh = forms.mesh();
    const SpMat& M = forms.M();
    for (int k = 0; k < 4; ++k) {
        basis_[k] = bernoulli_navier(mesh, CVec4::Unit(k), chi);
        mbasis_[k] = M * basis_[k];
    }
    for (int a = 0; a < 2; ++a)
        inplane_[a] = interpolate(mesh, [&](const Vec2&, double) {
            return std::array<cplx, 3>{a == 0 ? 1.0 : 0.0, a == 1 ? 1.0 : 0.0, 0.0};
        });
    for (int d = 0; d < 4; ++d)
        for (int m = 0; m < 4; ++m) C_(d, m) = mbasis_[d].dot(basis_[m]);
    C_ = 0.5 * (C_ + C_.adjoint()).eval();
    symmetry_ = is_centrally_symmetric(mesh.section);
}

CVec FiberContext::embed(const CVec4& m) const {
    CVec u = CVec::Zero(forms_.num_dofs());
    for (int k = 0; k < 4; ++k)
        if (m(k) != 0.0) u += m(k) * basis_[k];
    return u;
}

CVec4 FiberContext::momentum(const CVec& f) const {
    CVec4 r;
    for (int k = 0; k < 4; ++k) r(k) = mbasis_[k].dot(f);
    return r;
}

CVec FiberContext::b1(const CVec4& m) const {
    CVec u = CVec::Zero(forms_.num_dofs());
    for (int k = 0; k < 4; ++k)
        if (m(k) != 0.0) u += m(k) * tensor_.correctors[k];
    return u;
}

CVec FiberContext::SS(const CVec& u) const { return forms_.Kss() * u; }
CVec FiberContext::SX(const CVec& v) const { return cplx(0.0, chi_) * (forms_.G() * v); }
CVec FiberContext::XS(const CVec& u) const {
    return cplx(0.0, -chi_) * (forms_.G().transpose() * u);
}
CVec FiberContext::XX(const CVec& v) const { return (chi_ * chi_) * (forms_.H() * v); }

CVec FiberContext::LX(const CVec4& m) const {
    const CVec im = embed(m);
    return XS(im) + XX(im);
}

CVec FiberContext::mass(const CVec& u) const { return forms_.M() * u; }

CVec4 FiberContext::pair_lambda(const CVec& u, const CVec& v) const {
    const CVec w = SS(u) + XS(u) + SX(v) + XX(v);
    CVec4 r;
    for (int k = 0; k < 4; ++k) r(k) = basis_[k].dot(w);
    return r;
}

CVec4 FiberContext::pair_x(const CVec& u, const CVec& v) const {
    const CVec w = XS(u) + XX(v);
    CVec4 r = CVec4::Zero();
    for (int a = 0; a < 2; ++a) r(a) = inplane_[a].dot(w);
    return r;
}

CVec FiberContext::cell_solve(double t, const CVec& rhs, double scale, double* residual) const {
    const CellSolver& solver = forms_.cell_solver();
    const double nb = rhs.norm();
    const double res = nb == 0.0 ? 0.0 : solver.kernel_residual(rhs) * nb / (scale > 0.0 ? scale : nb);
    if (residual) *residual = res;
    if (res > 1e-8)
        throw IncompatibleLoad("corrector load does not annihilate the kernel (residual " +
                               std::to_string(res) + " relative to the load)");
    return solver.solve(t, rhs, nullptr, std::numeric_limits<double>::infinity());
}

CVec fiber_momentum(const FiberContext& ctx, const CVec& f, Which which) {
    return from_rod(ctx.momentum(f), which);
}

CVec embed(const FiberContext& ctx, const CVec& m, Which which) {
    return ctx.embed(to_rod(m, which));
}

CVec prepare_load(const FiberContext& ctx, const FiberProblem& p) {
    if (p.f.size() != ctx.forms().num_dofs()) throw InvalidArgument("load has the wrong size");
    CVec F = apply_scaling(p.f, p.scaling);
    if (p.regime == Regime::Stretch || p.regime == Regime::Bend) {
        if (!ctx.symmetric() || !ctx.forms().profile().satisfies_rod_symmetry())
            throw InvalidArgument("stretch and bend regimes need a symmetric section and material");
        F = project_symmetry(ctx.forms(), F, p.regime == Regime::Bend ? Which::Bend : Which::Stretch,
                             ctx.pairing());
    }
    return F;
}

CVec reference_solve(const FiberContext& ctx, const FiberProblem& p) {
    const CVec F = prepare_load(ctx, p);
    const ResolventSolver solver(ctx.forms(), ctx.chi(), p.t, p.c);
    const CVec rhs = ctx.mass(F);
    const CVec u = solver.solve(rhs);
    if (solver.residual(u, rhs) > 1e-10)
        throw SingularSystem("reference resolvent residual above tolerance");
    return u;
}

CVec ApproximationChain::approximant(int order) const {
    if (u0.empty()) throw InvalidArgument("empty chain");
    if (order == 0) return u0[0];
    if (order == 1 && u0.size() > 1) return u0[0] + u0[1] + u1[0];
    throw InvalidArgument("chain too short for the requested order");
}

CVec ApproximationChain::eps_approximant(int order) const {
    if (u0.empty()) throw InvalidArgument("empty chain");
    if (order == 0) return u0[0];
    if (order == 1) return u0[0] + u1[0];
    if (order == 2 && u0.size() > 1) return u0[0] + u1[0] + u0[1];
    throw InvalidArgument("chain too short for the requested order");
}

double ApproximationChain::max_kernel_residual() const {
    double r = 0.0;
    for (const auto& s : steps) r = std::max(r, s.kernel_residual);
    return r;
}

namespace {

class ChainBuilder {
public:
    ChainBuilder(const FiberContext& ctx, const FiberProblem& p, ApproximationChain& out)
        : ctx_(ctx), t_(p.t), c_(p.c), identity_(p.bend_identity), out_(out),
          scale_(ctx.mass(out.load).norm()) {}

    CVec solve(const std::string& name, const CVec& rhs) {
        double res = 0.0;
        CVec u = ctx_.cell_solve(t_, rhs, scale_, &res);
        out_.steps.push_back({name, res});
        return u;
    }

    // (t A + c C) m = rhs restricted to the index set.
    CVec4 msolve(const std::vector<int>& idx, const CVec4& rhs) const {
        const int n = static_cast<int>(idx.size());
        CMat a(n, n);
        CVec b(n);
        for (int i = 0; i < n; ++i) {
            b(i) = rhs(idx[i]);
            for (int j = 0; j < n; ++j) {
                const bool bend_block = idx[i] < 2 && idx[j] < 2;
                const cplx cij = identity_ && bend_block ? cplx(idx[i] == idx[j] ? 1.0 : 0.0)
                                                         : ctx_.C()(idx[i], idx[j]);
                a(i, j) = t_ * ctx_.A()(idx[i], idx[j]) + c_ * cij;
            }
        }
        Eigen::FullPivLU<CMat> lu(a);
        if (!lu.isInvertible()) throw SingularSystem("homogenised coefficient matrix is singular");
        const CVec x = lu.solve(b);
        CVec4 m = CVec4::Zero();
        for (int i = 0; i < n; ++i) m(idx[i]) = x(i);
        return m;
    }

    void push_level(const CVec4& m, const CVec& u0, const CVec& u1) {
        out_.m.push_back(m);
        out_.u0.push_back(u0);
        out_.u1.push_back(u1);
    }

    CVec sym(const CVec& u) const { return ctx_.SX(u) + ctx_.XS(u); }
    CVec axial(const CVec& u) const { return mask_components(u, Component::Axial); }
    CVec inplane(const CVec& u) const { return mask_components(u, Component::InPlane); }

    const FiberContext& ctx_;
    double t_;
    cplx c_;
    bool identity_;
    ApproximationChain& out_;
    double scale_;
};

void stretch_chain(ChainBuilder& b, const CVec& F, bool leading_only) {
    const auto& ctx = b.ctx_;
    const double t = b.t_;
    const cplx c = b.c_;
    const std::vector<int> idx{2, 3};
    const CVec4 m = b.msolve(idx, ctx.momentum(F));
    const CVec u0 = ctx.embed(m), u1 = ctx.b1(m);
    b.push_level(m, u0, u1);
    if (leading_only) return;
    const CVec u2 = b.solve("u2", -t * (b.sym(u1) + ctx.LX(m)) - c * ctx.mass(u0) + ctx.mass(F));
    b.out_.u2.push_back(u2);
    const CVec4 m1 = b.msolve(idx, -t * ctx.pair_lambda(u2, u1));
    const CVec u01 = ctx.embed(m1), u11 = ctx.b1(m1);
    b.push_level(m1, u01, u11);
    const CVec u21 = b.solve("u2^(1)", -t * (b.sym(u2 + u11) + ctx.LX(m1) + ctx.XX(u1)) -
                                           c * ctx.mass(u1 + u01));
    b.out_.u2.push_back(u21);
}

void bend_chain(ChainBuilder& b, const CVec& F, bool leading_only) {
    const auto& ctx = b.ctx_;
    const double t = b.t_;
    const cplx c = b.c_;
    const bool full_gram = !b.identity_;
    const std::vector<int> idx{0, 1};
    const CVec mf = ctx.mass(F);

    const CVec4 m = b.msolve(idx, ctx.momentum(F));
    const CVec u0 = ctx.embed(m), u1 = ctx.b1(m);
    b.push_level(m, u0, u1);
    if (leading_only) return;
    const CVec mu0 = ctx.mass(u0);
    CVec rhs = -t * (b.sym(u1) + ctx.LX(m)) + b.axial(mf);
    if (full_gram) rhs -= c * b.axial(mu0);
    const CVec u2 = b.solve("u2", rhs);
    const CVec u3 =
        b.solve("u3", -t * (b.sym(u2) + ctx.XX(u1)) - c * b.inplane(mu0) + b.inplane(mf));
    b.out_.u2.push_back(u2);
    b.out_.u3.push_back(u3);

    // First refinement.
    const CVec4 m1 = b.msolve(idx, -t * ctx.pair_x(u3, u2));
    const CVec u01 = ctx.embed(m1), u11 = ctx.b1(m1);
    b.push_level(m1, u01, u11);
    const CVec mu01 = ctx.mass(u01);
    rhs = -t * (b.sym(u11) + ctx.LX(m1));
    if (full_gram) rhs -= c * b.axial(mu01);
    const CVec u21 = b.solve("u2^(1)", rhs);
    const CVec u31 = b.solve("u3^(1)", -t * (b.sym(u21 + u3) + ctx.XX(u11 + u2)) -
                                           c * b.inplane(mu01));
    b.out_.u2.push_back(u21);
    b.out_.u3.push_back(u31);

    // Second refinement; the axial part of -c M u1 enters the u2-type problem
    // and its momentum the coefficient equation.
    CVec4 rhs_m = -t * ctx.pair_x(u31, u21 + u3);
    const CVec mu1 = ctx.mass(u1);
    if (full_gram) {
        const CVec4 mom = ctx.momentum(b.axial(u1));
        rhs_m(0) -= c * mom(0);
        rhs_m(1) -= c * mom(1);
    }
    const CVec4 m2 = b.msolve(idx, rhs_m);
    const CVec u02 = ctx.embed(m2), u12 = ctx.b1(m2);
    b.push_level(m2, u02, u12);
    const CVec mu02 = ctx.mass(u02);
    rhs = -t * (b.sym(u12) + ctx.LX(m2));
    if (full_gram) rhs -= c * b.axial(mu02 + mu1);
    const CVec u22 = b.solve("u2^(2)", rhs);
    const CVec u32 = b.solve("u3^(2)", -t * (b.sym(u22 + u31) + ctx.XX(u12 + u21 + u3)) -
                                           c * b.inplane(mu02) - c * b.inplane(mu1));
    b.out_.u2.push_back(u22);
    b.out_.u3.push_back(u32);
}

void general_chain(ChainBuilder& b, const CVec& F, Regime regime, bool leading_only) {
    const auto& ctx = b.ctx_;
    const double t = b.t_;
    const cplx c = b.c_;
    const int levels = regime == Regime::General2 ? 1 : 3;
    const std::vector<int> idx{0, 1, 2, 3};
    const auto& mesh = ctx.forms().mesh();
    auto constant = [&](cplx a1, cplx a2) {
        return interpolate(mesh, [&](const Vec2&, double) {
            return std::array<cplx, 3>{a1, a2, 0.0};
        });
    };
    // Mean in-plane load (the product cell has unit measure).
    const CVec ones1 = constant(1.0, 0.0), ones2 = constant(0.0, 1.0);
    const CVec mf = ctx.mass(F);
    const CVec fbar = constant(ones1.dot(mf), ones2.dot(mf));
    const CVec zero = CVec::Zero(ctx.forms().num_dofs());

    std::vector<CVec> u2;
    CVec mhat_prev;
    for (int k = 0; k <= levels; ++k) {
        CVec4 m;
        if (k == 0) {
            m = b.msolve(idx, ctx.momentum(F));
        } else {
            const CVec& u2_2 = k >= 2 ? u2[k - 2] : zero;
            CVec4 rhs = -t * ctx.pair_lambda(u2[k - 1], b.out_.u1[k - 1] + u2_2);
            if (regime == Regime::General4 && k == 3) rhs -= c * ctx.momentum(b.out_.u1[0]);
            m = b.msolve(idx, rhs);
        }
        const CVec u0k = ctx.embed(m), u1k = ctx.b1(m);
        b.push_level(m, u0k, u1k);
        if (leading_only) return;
        const CVec mhat = constant(m(0), m(1));
        const CVec& u2_1 = k >= 1 ? u2[k - 1] : zero;
        const CVec& u2_2 = k >= 2 ? u2[k - 2] : zero;
        const CVec& u1_1 = k >= 1 ? b.out_.u1[k - 1] : zero;
        CVec rhs = -t * (b.sym(u1k + u2_1) + ctx.LX(m) + ctx.XX(u2_2 + u1_1)) -
                   c * ctx.mass(u0k - mhat);
        if (k >= 1) rhs -= c * ctx.mass(mhat_prev);
        if (k == 0) rhs += ctx.mass(F - fbar);
        if (k == 1) rhs += ctx.mass(fbar);
        if ((regime == Regime::General4 && k == 3) || (regime == Regime::General2 && k == 1))
            rhs -= c * ctx.mass(b.out_.u1[0]);
        u2.push_back(b.solve(k == 0 ? "u2" : "u2^(" + std::to_string(k) + ")", rhs));
        mhat_prev = mhat;
    }
    b.out_.u2 = u2;
}

}  // namespace

ApproximationChain build_chain(const FiberContext& ctx, const FiberProblem& p) {
    return build_chain(ctx, p, false);
}

ApproximationChain build_chain(const FiberContext& ctx, const FiberProblem& p, bool leading_only) {
    if (p.chi != ctx.chi()) throw InvalidArgument("chain chi differs from the context chi");
    if (!(p.t > 0.0)) throw InvalidArgument("chain needs t > 0");
    ApproximationChain out;
    out.regime = p.regime;
    out.chi = p.chi;
    out.t = p.t;
    out.c = p.c;
    out.load = prepare_load(ctx, p);
    ChainBuilder b(ctx, p, out);
    switch (p.regime) {
        case Regime::Stretch: stretch_chain(b, out.load, leading_only); break;
        case Regime::Bend: bend_chain(b, out.load, leading_only); break;
        default: general_chain(b, out.load, p.regime, leading_only); break;
    }
    return out;
}

std::vector<RateRow> error_report(const FiberContext& ctx, const ApproximationChain& chain,
                                  const CVec& reference, bool componentwise) {
    std::vector<RateRow> rows;
    const std::vector<Component> comps =
        componentwise ? std::vector<Component>{Component::InPlane, Component::Axial}
                      : std::vector<Component>{Component::All};
    for (int order = 0; order <= 1; ++order) {
        const CVec e = reference - chain.approximant(order);
        for (Component comp : comps) {
            const CVec ec = mask_components(e, comp);
            rows.push_back({chain.chi, comp, order, l2_norm(ctx.forms(), ec),
                            h1_norm(ctx.forms(), ec)});
        }
    }
    return rows;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4) throw InvalidArgument("slope fit needs >= 4 points");
    const int n = static_cast<int>(x.size());
    Mat a(n, 2);
    Vec b(n);
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("slope fit needs positive data");
        a(i, 0) = std::log(x[i]);
        a(i, 1) = 1.0;
        b(i) = std::log(y[i]);
    }
    const Vec coef = a.colPivHouseholderQr().solve(b);
    return coef(0);
}

RayleighReport rayleigh_bounds(const FiberContext& ctx) {
    if (ctx.chi() == 0.0) throw InvalidArgument("rayleigh_bounds needs chi != 0");
    const auto& forms = ctx.forms();
    const CSpMat K = forms.K(ctx.chi());
    const CSpMat M = forms.M().cast<cplx>();
    auto max_quotient = [&](int first) {
        CMat v(forms.num_dofs(), 2);
        v.col(0) = ctx.embed(CVec4::Unit(first));
        v.col(1) = ctx.embed(CVec4::Unit(first + 1));
        CMat kr = v.adjoint() * (K * v), mr = v.adjoint() * (M * v);
        kr = 0.5 * (kr + kr.adjoint()).eval();
        mr = 0.5 * (mr + mr.adjoint()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(kr, mr);
        return ges.eigenvalues().maxCoeff();
    };
    RayleighReport r;
    r.chi = ctx.chi();
    r.bend_max = max_quotient(0);
    r.stretch_max = max_quotient(2);
    EigenOptions opt;
    opt.deflate.resize(forms.num_dofs(), 4);
    for (int k = 0; k < 4; ++k) opt.deflate.col(k) = ctx.embed(CVec4::Unit(k));
    r.complement_min = smallest_eigs(forms, ctx.chi(), 1, opt).front().value;
    return r;
}

SpectrumReport spectrum_scaling(const AssembledForms& forms, const std::vector<double>& chis) {
    SpectrumReport rep;
    bool first = true;
    for (double chi : chis) {
        if (!(chi > 0.0 && chi < M_PI)) throw InvalidArgument("chi grid must lie in (0, pi)");
        SpectrumRow row;
        row.chi = chi;
        for (const auto& e : smallest_eigs(forms, chi, 5)) row.lambda.push_back(e.value);
        const double c2 = chi * chi, c4 = c2 * c2;
        const double b_lo = std::min(row.lambda[0], row.lambda[1]) / c4;
        const double b_hi = std::max(row.lambda[0], row.lambda[1]) / c4;
        const double s_lo = std::min(row.lambda[2], row.lambda[3]) / c2;
        const double s_hi = std::max(row.lambda[2], row.lambda[3]) / c2;
        if (first) {
            rep.bend_min = b_lo;
            rep.bend_max = b_hi;
            rep.stretch_min = s_lo;
            rep.stretch_max = s_hi;
            rep.rest_min = rep.rest_max = row.lambda[4];
            first = false;
        } else {
            rep.bend_min = std::min(rep.bend_min, b_lo);
            rep.bend_max = std::max(rep.bend_max, b_hi);
            rep.stretch_min = std::min(rep.stretch_min, s_lo);
            rep.stretch_max = std::max(rep.stretch_max, s_hi);
            rep.rest_min = std::min(rep.rest_min, row.lambda[4]);
            rep.rest_max = std::max(rep.rest_max, row.lambda[4]);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

ContourReport contour_quadrature_check(const FiberContext& ctx, double eps, double gamma,
                                       const CVec& f, Regime regime, int nodes, double delta) {
    if (regime != Regime::Stretch && regime != Regime::Bend)
        throw InvalidArgument("contour check supports the stretch and bend regimes");
    if (!(eps > 0.0) || nodes < 8) throw InvalidArgument("contour check needs eps > 0, nodes >= 8");
    const double chi = ctx.chi();
    const int p = regime_power(regime);
    const double t0 = std::pow(std::abs(chi), -p);
    const double t_eps = std::pow(eps, -(gamma + 2.0));
    const double s = t_eps / t0;

    const int off = regime == Regime::Bend ? 0 : 2;
    CMat a = ctx.A().block(off, off, 2, 2), cm = ctx.C().block(off, off, 2, 2);
    Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(t0 * a, cm);
    ContourReport rep;
    const double lo = ges.eigenvalues().minCoeff(), hi = ges.eigenvalues().maxCoeff();
    rep.eigenvalues = {lo, hi};
    rep.center = 0.5 * (lo + hi);
    const double rho0 = 0.5 * lo;
    rep.radius = 0.5 * (hi - lo) + rho0;
    for (double l : rep.eigenvalues)
        if (std::abs(rep.radius - std::abs(l - rep.center)) < 0.5 * rho0)
            throw ContourTooClose("homogenised eigenvalue too close to the contour");
    if (std::abs(-1.0 / s - rep.center) <= rep.radius)
        throw ContourTooClose("pole of g inside the contour");

    FiberProblem prob;
    prob.chi = chi;
    prob.regime = regime;
    prob.f = f;
    prob.scaling = regime == Regime::Bend ? Scaling::eps_delta(eps, delta) : Scaling::none();
    prob.t = t_eps;
    prob.c = 1.0;
    const ApproximationChain direct = build_chain(ctx, prob);

    const int n = ctx.forms().num_dofs();
    CVec q0 = CVec::Zero(n), q1 = CVec::Zero(n), q01 = CVec::Zero(n);
    prob.t = t0;
    for (int j = 0; j < nodes; ++j) {
        const double th = 2.0 * M_PI * (j + 0.5) / nodes;
        const cplx e = std::exp(cplx(0.0, th));
        const cplx z = rep.center + rep.radius * e;
        prob.c = -z;
        const ApproximationChain ch = build_chain(ctx, prob);
        // dz / (2 pi i) = r e^{i theta} d theta / (2 pi).
        const cplx w = (1.0 / (s * z + 1.0)) * rep.radius * e / static_cast<double>(nodes);
        q0 -= w * ch.u0[0];
        q1 -= w * ch.u1[0];
        q01 -= w * ch.u0[1];
    }
    const auto& forms = ctx.forms();
    auto rel = [&](const CVec& q, const CVec& d) {
        const double nd = l2_norm(forms, d);
        return nd == 0.0 ? l2_norm(forms, q) : l2_norm(forms, q - d) / nd;
    };
    rep.err_u0 = rel(q0, direct.u0[0]);
    rep.err_u1 = rel(q1, direct.u1[0]);
    rep.err_u0_1 = rel(q01, direct.u0[1]);
    return rep;
}

CVec random_smooth_load(const AssembledForms& forms, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    // Coefficients of 1, x1, x2, x1^2, x1 x2, x2^2 times cos/sin of 2 pi q y.
    std::array<std::array<std::array<double, 5>, 6>, 3> coef;
    for (auto& comp : coef)
        for (auto& mono : comp)
            for (double& v : mono) v = nd(rng);
    CVec f = interpolate(forms.mesh(), [&](const Vec2& x, double y) {
        const std::array<double, 6> mono{1.0, x.x(), x.y(), x.x() * x.x(), x.x() * x.y(),
                                         x.y() * x.y()};
        const std::array<double, 5> modes{1.0, std::cos(2 * M_PI * y), std::sin(2 * M_PI * y),
                                          std::cos(4 * M_PI * y), std::sin(4 * M_PI * y)};
        std::array<cplx, 3> v{};
        for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 6; ++a)
                for (int q = 0; q < 5; ++q) v[c] += coef[c][a][q] * mono[a] * modes[q];
        return v;
    });
    return f / l2_norm(forms, f);
}

FiberRateStudy fiber_rate_study(const AssembledForms& forms, Regime regime,
                                const std::vector<double>& chis, int loads, std::uint64_t seed,
                                bool bend_identity) {
    if (loads < 1) throw InvalidArgument("need at least one load");
    FiberRateStudy study;
    study.regime = regime;
    const bool componentwise = regime == Regime::Bend || regime == Regime::General4;
    const int p = regime_power(regime);
    for (double chi : chis) {
        const FiberContext ctx(forms, chi);
        FiberProblem prob;
        prob.chi = chi;
        prob.t = std::pow(std::abs(chi), -p);
        prob.regime = regime;
        prob.bend_identity = bend_identity;
        prob.scaling = p == 4 ? Scaling::abs_chi(chi) : Scaling::none();
        const ResolventSolver solver(forms, chi, prob.t, 1.0);
        std::vector<RateRow> worst;
        for (int l = 0; l < loads; ++l) {
            prob.f = random_smooth_load(forms, seed + static_cast<std::uint64_t>(l));
            const ApproximationChain chain = build_chain(ctx, prob);
            study.max_kernel_residual = std::max(study.max_kernel_residual, chain.max_kernel_residual());
            const CVec ref = solver.solve(ctx.mass(chain.load));
            const auto rows = error_report(ctx, chain, ref, componentwise);
            if (worst.empty()) worst = rows;
            else
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    worst[i].err_l2 = std::max(worst[i].err_l2, rows[i].err_l2);
                    worst[i].err_h1 = std::max(worst[i].err_h1, rows[i].err_h1);
                }
        }
        study.rows.insert(study.rows.end(), worst.begin(), worst.end());
    }
    std::map<std::pair<int, int>, std::vector<const RateRow*>> groups;
    for (const auto& r : study.rows)
        groups[{static_cast<int>(r.component), r.order}].push_back(&r);
    for (const auto& [key, rows] : groups) {
        std::vector<double> x, yl, yh;
        for (const RateRow* r : rows) {
            x.push_back(r->chi);
            yl.push_back(r->err_l2);
            yh.push_back(r->err_h1);
        }
        study.slopes.push_back({static_cast<Component>(key.first), key.second, fit_slope(x, yl),
                                fit_slope(x, yh)});
    }
    return study;
}

}  // namespace rodhom
