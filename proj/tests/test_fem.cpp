#include <doctest.h>

#include <random>

#include "rodhom/fem.hpp"

using namespace rodhom;

namespace {

const AssembledForms& small_forms() {
    static const AssembledForms f(two_phase_profile(5.0), make_product_mesh(build_rectangle(1.0, 4, 4), 4));
    return f;
}

CVec random_field(int n, unsigned seed) {
    std::mt19937 g(seed);
    std::normal_distribution<double> d;
    CVec u(n);
    for (int i = 0; i < n; ++i) u(i) = cplx(d(g), d(g));
    return u;
}

}  // namespace

TEST_CASE("rigid motions lie in the kernel of the symmetric gradient form") {
    const auto& f = small_forms();
    const Mat& W = f.kernel_basis();
    REQUIRE(W.cols() == 4);
    CHECK((f.Kss() * W).norm() <= 1e-12 * f.stiffness_norm());
}

TEST_CASE("mass matrix integrates constants to the cell volume") {
    const auto& f = small_forms();
    const ProductMesh& mesh = f.mesh();
    for (int c = 0; c < 3; ++c) {
        Vec e = Vec::Zero(f.num_dofs());
        for (int n = 0; n < mesh.num_nodes(); ++n) e(3 * n + c) = 1.0;
        CHECK(e.dot(f.M() * e) == doctest::Approx(1.0));
    }
    const CVec one = CVec::Ones(f.num_dofs());
    CHECK(l2_norm(f, one) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("fiber form is Hermitian and matches element quadrature") {
    const auto& f = small_forms();
    for (double chi : {0.0, 0.3, -1.1}) {
        const CSpMat K = f.K(chi);
        CHECK(CSpMat(K - CSpMat(K.adjoint())).norm() <= 1e-13 * f.stiffness_norm());
        const CVec u = random_field(f.num_dofs(), 3);
        CHECK((K * u - f.apply_K(chi, u)).norm() <= 1e-12 * (K * u).norm());
        const double e = std::real(u.dot(K * u));
        CHECK(energy_by_quadrature(f, chi, u) == doctest::Approx(e).epsilon(1e-10));
    }
}

TEST_CASE("resolvent solver accuracy and energy bound") {
    const auto& f = small_forms();
    const ResolventSolver s(f, 0.4, 50.0, 1.0);
    const CVec F = random_field(f.num_dofs(), 5);
    const CVec u = s.solve_mass_load(F);
    CHECK(s.residual(u, f.M() * F) < 1e-14);
    CHECK(l2_norm(f, u) <= l2_norm(f, F) * (1.0 + 1e-12));
}

TEST_CASE("four zero eigenvalues at chi = 0 and a gap") {
    const auto eig = smallest_eigs(small_forms(), 0.0, 5);
    REQUIRE(eig.size() == 5);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(eig[i].value) < 1e-8);
    CHECK(eig[4].value > 1.0);
}

TEST_CASE("constrained cell solve rejects incompatible loads") {
    const auto& f = small_forms();
    const CellSolver& cs = f.cell_solver();
    CVec load = CVec::Zero(f.num_dofs());
    for (int n = 0; n < f.mesh().num_nodes(); ++n) load(3 * n) = 1.0;
    CHECK_THROWS_AS(cs.solve(1.0, f.M() * load), IncompatibleLoad);
    const CVec F = random_field(f.num_dofs(), 8);
    const CMat W = f.kernel_basis().cast<cplx>();
    const CMat R = f.R().cast<cplx>();
    const CVec compatible = F - W * (R * W).inverse() * (R * F);
    CHECK(cs.kernel_residual(f.M() * compatible) < 1e-8);
}

TEST_CASE("symmetry projections are complementary idempotents") {
    const auto& f = small_forms();
    const SymmetryInfo s = is_centrally_symmetric(f.mesh().section);
    const CVec u = random_field(f.num_dofs(), 9);
    const CVec b = project_symmetry(f, u, Which::Bend, s.pairing);
    const CVec t = project_symmetry(f, u, Which::Stretch, s.pairing);
    CHECK((b + t - u).norm() < 1e-12 * u.norm());
    CHECK((project_symmetry(f, b, Which::Bend, s.pairing) - b).norm() < 1e-12 * u.norm());
    CHECK(std::abs(b.dot(f.M() * t)) < 1e-12 * u.squaredNorm());
}

TEST_CASE("component masks split a field") {
    const CVec u = random_field(12, 11);
    CHECK((mask_components(u, Component::InPlane) + mask_components(u, Component::Axial) - u).norm() == 0.0);
    CHECK(mask_components(u, Component::Axial)(0) == cplx(0.0));
}
