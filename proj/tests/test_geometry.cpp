#include <doctest.h>

#include "rodhom/geometry.hpp"

using namespace rodhom;

TEST_CASE("rectangle is normalised to unit area, centroid and principal axes") {
    for (double aspect : {1.0, 2.0}) {
        const CrossSectionMesh m = build_rectangle(aspect, 6, 4);
        const RawMoments r = raw_moments(m);
        CHECK(r.area == doctest::Approx(1.0));
        CHECK(std::abs(r.x1) < 1e-14);
        CHECK(std::abs(r.x2) < 1e-14);
        CHECK(std::abs(r.x1x2) < 1e-14);
        // Side lengths sqrt(aspect) and 1 / sqrt(aspect), in some order.
        CHECK(r.x1x1 + r.x2x2 == doctest::Approx((aspect + 1.0 / aspect) / 12.0));
        CHECK(r.x1x1 * r.x2x2 == doctest::Approx(1.0 / 144.0));
    }
}

TEST_CASE("moment data at chi") {
    const MomentData d = compute_moments(build_rectangle(1.0, 4, 4), 0.5);
    CHECK(d.c1 == doctest::Approx(1.0 / 12.0));
    CHECK(d.C_stretch(0, 0) == doctest::Approx(1.0 / 6.0));
    CHECK(d.C_bend(0, 0) == doctest::Approx(1.0 + 0.25 / 12.0));
    CHECK(d.C_rod_chi(3, 3) == doctest::Approx(1.0));
}

TEST_CASE("central symmetry pairing") {
    const CrossSectionMesh m = build_rectangle(1.5, 5, 3);
    const SymmetryInfo s = is_centrally_symmetric(m);
    REQUIRE(s.symmetric);
    for (int a = 0; a < m.num_nodes(); ++a)
        CHECK((m.nodes[s.pairing[a]] + m.nodes[a]).norm() < 1e-12);
}

TEST_CASE("product mesh indexing is periodic") {
    const ProductMesh p = make_product_mesh(build_rectangle(1.0, 2, 2), 4);
    CHECK(p.num_nodes() == 9 * 4);
    CHECK(p.node(3, 4) == p.node(3, 0));
    CHECK(p.periodic_partner(2) == 2);
    CHECK(p.y(0) == doctest::Approx(-0.5));
    CHECK(p.y(2) == doctest::Approx(0.0));
}

TEST_CASE("mesh hash and json geometry") {
    const ProductMesh a = geometry_from_json(geometry_to_json(4, 4, 1.0, 4));
    const ProductMesh b = make_product_mesh(build_rectangle(1.0, 4, 4), 4);
    CHECK(mesh_hash(a) == mesh_hash(b));
    CHECK(mesh_hash(a) != mesh_hash(make_product_mesh(build_rectangle(1.0, 4, 4), 6)));
}
