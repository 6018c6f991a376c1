#include <doctest.h>

#include <random>

#include "rodhom/transform.hpp"

using namespace rodhom;

namespace {

const AssembledForms& forms() {
    static const AssembledForms f(homogeneous_profile(make_isotropic(1.0, 1.0)),
                                  make_product_mesh(build_rectangle(1.0, 3, 3), 4));
    return f;
}

LineField random_line(int N, double eps, unsigned seed, bool real) {
    const auto& mesh = forms().mesh();
    LineField f = make_line_field(N, mesh.n_y, eps, mesh.n2());
    std::mt19937 g(seed);
    std::normal_distribution<double> d;
    for (Eigen::Index i = 0; i < f.values.rows(); ++i)
        for (Eigen::Index j = 0; j < f.values.cols(); ++j)
            f.values(i, j) = real ? cplx(d(g), 0.0) : cplx(d(g), d(g));
    return f;
}

}  // namespace

TEST_CASE("Gelfand transform is unitary and invertible for odd and even N") {
    for (int N : {7, 8, 12}) {
        const LineField f = random_line(N, 0.3, N, false);
        const FiberBundle b = gelfand(f);
        const double a = line_l2_norm(f, forms().M2());
        CHECK(std::abs(bundle_l2_norm(b, forms().M2()) - a) <= 1e-12 * a);
        CHECK(max_abs_diff(gelfand_inverse(b), f) <= 1e-12 * f.values.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("bundles of real fields are conjugation symmetric") {
    const int N = 8;
    const FiberBundle b = gelfand(random_line(N, 0.25, 3, true));
    for (std::size_t i = 0; i < b.k.size(); ++i)
        for (std::size_t j = 0; j < b.k.size(); ++j)
            if (b.k[i] == -b.k[j]) CHECK((b.fibers[i] - b.fibers[j].conjugate()).norm() < 1e-12);
}

TEST_CASE("smoothing: dual characterisations, idempotence and contraction") {
    const LineField f = random_line(8, 0.5, 4, false);
    const LineField a = xi_smoothing_fourier(f);
    const LineField b = xi_smoothing_fiber(f);
    const double s = a.values.cwiseAbs().maxCoeff();
    CHECK(max_abs_diff(a, b) <= 1e-10 * s);
    CHECK(max_abs_diff(xi_smoothing_fourier(a), a) <= 1e-12 * s);
    CHECK(line_l2_norm(a, forms().M2()) <= line_l2_norm(f, forms().M2()));
}

TEST_CASE("Floquet variant and fiberwise derivative") {
    const LineField f = random_line(6, 0.2, 5, false);
    CHECK(floquet_check(f) < 1e-12);
    CHECK(gelfand_derivative_check(f) < 1e-9 * spectral_derivative(f).values.cwiseAbs().maxCoeff());
}

TEST_CASE("fiber index grid") {
    const auto k8 = fiber_indices(8);
    CHECK(k8.front() == -4);
    CHECK(k8.back() == 3);
    const auto k7 = fiber_indices(7);
    CHECK(k7.front() == -3);
    CHECK(k7.back() == 3);
    CHECK(centred_index(5, 8) == -3);
    CHECK(centred_index(3, 8) == 3);
}

TEST_CASE("load scalings") {
    CVec u(6);
    u << 1, 2, 3, 4, 5, 6;
    CHECK((apply_scaling(u, Scaling::eps_delta(0.1, 0.0)) - u).norm() == 0.0);
    const CVec z = apply_scaling(u, Scaling::infinity());
    CHECK(z(2) == cplx(0.0));
    CHECK(z(5) == cplx(0.0));
    CHECK(z(4) == cplx(5.0));
    const CVec back = apply_scaling(apply_scaling(u, Scaling::abs_chi(0.3)), Scaling::eps_delta(0.3, -1.0));
    CHECK(std::abs(apply_scaling(u, Scaling::eps_delta(0.5, 1.0))(2) - cplx(6.0)) < 1e-14);
    CHECK((back - u).norm() < 1e-14);
}

TEST_CASE("misaligned bundles are rejected") {
    LineField f = make_line_field(4, 4, 0.1, forms().mesh().n2());
    f.values.resize(3, 3);
    CHECK_THROWS(gelfand(f));
}
