#include <doctest.h>

#include "rodhom/validation.hpp"

using namespace rodhom;

TEST_CASE("checks and criteria") {
    CHECK(make_check("a", 1.0, "<=", 1.0).pass);
    CHECK_FALSE(make_check("a", 1.0, "<", 1.0).pass);
    CHECK_FALSE(make_check("a", std::nan(""), ">=", 0.0).pass);
    CHECK_THROWS(make_check("a", 1.0, "==", 1.0));
    CriterionResult c;
    CHECK_FALSE(c.pass());
    c.checks.push_back(make_check("x", 0.0, "<=", 1.0));
    CHECK(c.pass());
    c.time_limit = 1.0;
    c.seconds = 2.0;
    CHECK_FALSE(c.pass());
    CHECK(to_json(c)["pass"] == false);
}

TEST_CASE("fiber criterion limits") {
    CHECK(fiber_slope_limit(Regime::Stretch, Component::All, 0) == 0.9);
    CHECK(fiber_slope_limit(Regime::Stretch, Component::All, 1) == 1.8);
    CHECK(fiber_slope_limit(Regime::Bend, Component::InPlane, 0) == 0.9);
    CHECK(fiber_slope_limit(Regime::Bend, Component::Axial, 0) == 1.8);
    CHECK(fiber_slope_limit(Regime::General4, Component::Axial, 1) == 2.6);
}

TEST_CASE("identities on a small model") {
    const Model m = build_model(two_phase_profile(5.0), make_product_mesh(build_rectangle(1.0, 3, 3), 4));
    const CriterionResult r = algebraic_identities(m, 8, 4.0, 1);
    for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
    CHECK(r.pass());
    CHECK(tensor_sanity(m).pass());
}

TEST_CASE("classical limits on a coarse mesh") {
    CHECK(classical_limits(10, 10, 2).pass());
}
