#include <doctest.h>

#include "rodhom/homogenize.hpp"
#include "rodhom/validation.hpp"

using namespace rodhom;

namespace {

const AssembledForms& layered() {
    static const AssembledForms f(two_phase_profile(5.0), make_product_mesh(build_rectangle(1.0, 6, 6), 6));
    return f;
}

}  // namespace

TEST_CASE("Saint-Venant series oracle for the square") {
    CHECK(saint_venant_torsion(1.0) == doctest::Approx(0.1406).epsilon(1e-3));
    CHECK(saint_venant_torsion(2.0) == doctest::Approx(saint_venant_torsion(0.5)).epsilon(1e-14));
    // Thin strip limit: J -> a b^3 / 3 (1 - 0.63 b / a).
    const double r = 100.0;
    CHECK(saint_venant_torsion(r) == doctest::Approx(1.0 / (3.0 * r) * (1.0 - 0.630182 / r)).epsilon(1e-4));
}

TEST_CASE("homogeneous isotropic rod: Young, bending and torsion stiffness") {
    const ProductMesh mesh = make_product_mesh(build_rectangle(1.0, 12, 12), 2);
    const RodTensor t = rod_tensor(homogeneous_profile(make_isotropic(1.0, 1.0)), mesh);
    CHECK(t.A_stretch(1, 1) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(t.A_bend(0, 0) == doctest::Approx(2.5 / 12.0).epsilon(0.01));
    CHECK(t.A_bend(1, 1) == doctest::Approx(2.5 / 12.0).epsilon(0.01));
    CHECK(t.A_stretch(0, 0) == doctest::Approx(saint_venant_torsion(1.0)).epsilon(0.01));
    CHECK(std::abs(t.A_stretch(0, 1)) < 1e-10);
}

TEST_CASE("layered rod tensor is symmetric, coercive and decoupled") {
    const RodTensor t = rod_tensor(layered());
    CHECK(t.symmetry_residual < 1e-10);
    CHECK(t.eta > 0.0);
    CHECK(t.coupling < 1e-8);
    CHECK((t.A_rod - t.A_rod.transpose()).norm() == 0.0);
    CHECK((t.A_rod.topLeftCorner<2, 2>() - t.A_bend).norm() == 0.0);
    CHECK((t.A_rod.bottomRightCorner<2, 2>() - t.A_stretch).norm() == 0.0);
    // Layering in y keeps the stretch modulus between the Reuss and Voigt bounds of
    // the two Young moduli 2.5 and 12.5.
    CHECK(t.A_stretch(1, 1) > 2.0 / (1.0 / 2.5 + 1.0 / 12.5) - 1e-12);
    CHECK(t.A_stretch(1, 1) < 0.5 * (2.5 + 12.5) + 1e-12);
}

TEST_CASE("cell correctors lie in H and solve the cell problem") {
    const auto& f = layered();
    for (int k = 0; k < 4; ++k) {
        SolveInfo info;
        const CVec u = solve_cell(f, Vec4::Unit(k), &info);
        CHECK(info.constraint_residual < 1e-10);
        CHECK((f.R().cast<cplx>() * u).norm() < 1e-10 * std::max(1.0, u.norm()));
    }
}

TEST_CASE("chi tensor is Hermitian and equals the scaled rod tensor") {
    const auto& f = layered();
    const RodTensor t = rod_tensor(f);
    for (double chi : {0.4, 0.2, 0.1}) {
        const ChiTensor c = chi_tensor(f, chi);
        CHECK(c.hermitian_residual < 1e-10);
        const CMat4 s = chi_tensor_from_scaling(t.A_rod, chi);
        CHECK((c.A_chi - s).norm() <= 1e-10 * s.norm());
    }
}

TEST_CASE("zero quasimomentum gives vanishing Lambda data") {
    const CVec u = solve_cell_chi(layered(), 0.0, CVec4::Ones());
    CHECK(u.norm() == 0.0);
}

TEST_CASE("regime coordinates embed into rod coordinates") {
    CVec m(2);
    m << cplx(1.0, 2.0), 3.0;
    const CVec4 r = to_rod(m, Which::Stretch);
    CHECK(r(0) == cplx(0.0));
    CHECK(r(2) == cplx(1.0, 2.0));
    CHECK((from_rod(r, Which::Stretch) - m).norm() == 0.0);
    CHECK((from_rod(to_rod(m, Which::Bend), Which::Bend) - m).norm() == 0.0);
}
