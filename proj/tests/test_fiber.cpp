#include <doctest.h>

#include <cmath>

#include "rodhom/fiber.hpp"

using namespace rodhom;

namespace {

const AssembledForms& forms() {
    static const AssembledForms f(two_phase_profile(5.0), make_product_mesh(build_rectangle(1.0, 4, 4), 4));
    return f;
}

FiberProblem problem(Regime r, double chi, const CVec& f) {
    FiberProblem p;
    p.chi = chi;
    p.regime = r;
    const int power = regime_power(r);
    p.t = std::pow(std::abs(chi), -power);
    p.scaling = power == 4 ? Scaling::abs_chi(chi) : Scaling::none();
    p.f = f;
    return p;
}

}  // namespace

TEST_CASE("embedding and momentum are adjoint") {
    const FiberContext ctx(forms(), 0.3);
    const CVec f = random_smooth_load(forms(), 1);
    CVec4 m;
    m << cplx(1.0, -0.5), 0.25, cplx(0.0, 2.0), -1.0;
    const CVec u = ctx.embed(m);
    const cplx lhs = u.dot(forms().M() * f);
    const cplx rhs = m.dot(ctx.momentum(f));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * l2_norm(forms(), u) * l2_norm(forms(), f));
}

TEST_CASE("embedding Gram matrix equals C_rod at chi") {
    for (double chi : {0.0, 0.2, 0.7}) {
        const FiberContext ctx(forms(), chi);
        const MomentData d = compute_moments(forms().mesh().section, chi);
        CHECK((ctx.C() - d.C_rod_chi.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zero load gives zero chains and zero reference") {
    const FiberContext ctx(forms(), 0.2);
    const CVec zero = CVec::Zero(forms().num_dofs());
    for (Regime r : {Regime::Stretch, Regime::Bend, Regime::General2, Regime::General4}) {
        const FiberProblem p = problem(r, 0.2, zero);
        const ApproximationChain c = build_chain(ctx, p);
        CHECK(c.approximant(1).norm() == 0.0);
        CHECK(c.eps_approximant(2).norm() == 0.0);
        CHECK(reference_solve(ctx, p).norm() == 0.0);
    }
}

TEST_CASE("corrector right-hand sides are compatible") {
    const FiberContext ctx(forms(), 0.15);
    const CVec f = random_smooth_load(forms(), 3);
    for (Regime r : {Regime::Stretch, Regime::Bend, Regime::General2, Regime::General4}) {
        const ApproximationChain c = build_chain(ctx, problem(r, 0.15, f));
        CHECK(!c.steps.empty());
        CHECK(c.max_kernel_residual() <= 1e-8);
    }
}

TEST_CASE("general chi^2 chain reduces to the stretch chain on stretch loads") {
    const double chi = 0.2;
    const FiberContext ctx(forms(), chi);
    const CVec f = project_symmetry(forms(), random_smooth_load(forms(), 4), Which::Stretch, ctx.pairing());
    const ApproximationChain s = build_chain(ctx, problem(Regime::Stretch, chi, f));
    const ApproximationChain g = build_chain(ctx, problem(Regime::General2, chi, f));
    CHECK((s.u0.front() - g.u0.front()).norm() <= 1e-8 * s.u0.front().norm());
}

TEST_CASE("identity variant of the bend chain differs by O(chi^2)") {
    const CVec f = random_smooth_load(forms(), 5);
    std::vector<double> d;
    for (double chi : {0.2, 0.1}) {
        const FiberContext ctx(forms(), chi);
        FiberProblem p = problem(Regime::Bend, chi, f);
        const CVec a = build_chain(ctx, p).approximant(0);
        p.bend_identity = true;
        const CVec b = build_chain(ctx, p).approximant(0);
        d.push_back((a - b).norm() / a.norm() / (chi * chi));
    }
    CHECK(d[0] > 0.0);
    CHECK(d[1] <= 1.5 * d[0]);
}

TEST_CASE("approximants improve on a single fiber") {
    const double chi = 0.1;
    const FiberContext ctx(forms(), chi);
    const CVec f = random_smooth_load(forms(), 6);
    for (Regime r : {Regime::Stretch, Regime::Bend}) {
        const ApproximationChain c = build_chain(ctx, problem(r, chi, f));
        const CVec ref = reference_solve(ctx, problem(r, chi, f));
        const double e0 = l2_norm(forms(), ref - c.approximant(0));
        const double e1 = l2_norm(forms(), ref - c.approximant(1));
        CHECK(e1 < e0);
        CHECK(e0 < 0.2 * l2_norm(forms(), ref));
    }
}

TEST_CASE("slope fit is exact on powers") {
    std::vector<double> x{0.4, 0.2, 0.1, 0.05}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
    CHECK(fit_slope(x, y) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS(fit_slope({1.0, 2.0}, {1.0, 2.0}));
}

TEST_CASE("Rayleigh quotient scalings on the invariant subspaces") {
    const double chi = 0.2;
    const RayleighReport r = rayleigh_bounds(FiberContext(forms(), chi));
    CHECK(r.bend_max / std::pow(chi, 4) < 10.0);
    CHECK(r.stretch_max / (chi * chi) < 20.0);
    CHECK(r.complement_min > 1.0);
}

TEST_CASE("contour quadrature agrees with the t-substitution") {
    const FiberContext ctx(forms(), 0.1);
    const CVec f = random_smooth_load(forms(), 7);
    for (Regime r : {Regime::Stretch, Regime::Bend}) {
        const ContourReport c = contour_quadrature_check(ctx, 0.05, 0.0, f, r);
        CHECK(c.err_u0 < 1e-5);
        CHECK(c.err_u1 < 1e-5);
        CHECK(c.err_u0_1 < 1e-5);
    }
    CHECK_THROWS_AS(contour_quadrature_check(ctx, 0.05, 0.0, f, Regime::General2), InvalidArgument);
}

TEST_CASE("chain context must match the problem") {
    const FiberContext ctx(forms(), 0.1);
    CHECK_THROWS_AS(build_chain(ctx, problem(Regime::Stretch, 0.2, random_smooth_load(forms(), 8))),
                    InvalidArgument);
}
