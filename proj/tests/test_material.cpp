#include <doctest.h>

#include "rodhom/material.hpp"

using namespace rodhom;

TEST_CASE("isotropic tensor entries and contraction") {
    const ElasticityTensor t = make_isotropic(2.0, 3.0);
    CHECK(t(0, 0, 0, 0) == doctest::Approx(8.0));
    CHECK(t(0, 0, 1, 1) == doctest::Approx(2.0));
    CHECK(t(0, 1, 0, 1) == doctest::Approx(3.0));
    CHECK(t(0, 1, 1, 0) == doctest::Approx(3.0));
    CHECK(t.symmetry_residual() == doctest::Approx(0.0));
    const Mat3 s = t.contract(Mat3::Identity());
    CHECK((s - (3.0 * 2.0 + 2.0 * 3.0) * Mat3::Identity()).norm() < 1e-14);
}

TEST_CASE("engineering strains reproduce the energy") {
    const ElasticityTensor t = make_isotropic(1.3, 0.7);
    Mat3 e;
    e << 0.1, 0.2, -0.3, 0.2, 0.5, 0.4, -0.3, 0.4, -0.2;
    const auto v = to_engineering(e);
    const double energy_voigt = v.dot(t.voigt() * v);
    const double energy_tensor = (t.contract(e).array() * e.array()).sum();
    CHECK(energy_voigt == doctest::Approx(energy_tensor).epsilon(1e-13));
    CHECK(voigt_index(1, 2) == 3);
    CHECK(voigt_index(2, 0) == 4);
    CHECK(voigt_index(0, 1) == 5);
}

TEST_CASE("isotropic coercivity constant is 2 mu") {
    CHECK(check_coercivity(make_isotropic(1.0, 1.0)) == doctest::Approx(2.0));
    CHECK(check_coercivity(make_isotropic(5.0, 0.25)) == doctest::Approx(0.5));
}

TEST_CASE("rod material symmetry detection") {
    CHECK(check_rod_material_symmetry(make_isotropic(1.0, 1.0), 1e-12));
    Mat6 c = make_isotropic(1.0, 1.0).voigt();
    c(0, 4) = c(4, 0) = 0.1;  // couples e11 with the 13 shear
    CHECK_FALSE(check_rod_material_symmetry(ElasticityTensor::from_voigt(c), 1e-12));
}

TEST_CASE("two-phase profile layering") {
    const MaterialProfile p = two_phase_profile(5.0);
    CHECK(p.evaluate(-0.25)(0, 0, 0, 0) == doctest::Approx(3.0));
    CHECK(p.evaluate(0.25)(0, 0, 0, 0) == doctest::Approx(15.0));
    CHECK(p.satisfies_rod_symmetry());
    CHECK(p.min_coercivity() == doctest::Approx(2.0));
}

TEST_CASE("material json round trip and hash") {
    const MaterialProfile p = two_phase_profile(5.0);
    const MaterialProfile q = material_from_json(material_to_json(p));
    CHECK(material_hash(p) == material_hash(q));
    CHECK(material_hash(p) != material_hash(two_phase_profile(4.0)));
    nlohmann::json j = {{"layers", {{{"from", -0.5}, {"to", 0.5}, {"model", {{"isotropic", {{"lambda", 1.0}, {"mu", 2.0}}}}}}}}};
    CHECK(material_from_json(j).evaluate(0.1)(0, 1, 0, 1) == doctest::Approx(2.0));
}

TEST_CASE("invalid profiles are rejected") {
    CHECK_THROWS_AS(MaterialProfile(std::vector<Layer>{}), InvalidArgument);
}
