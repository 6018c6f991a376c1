#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "rodhom/pipeline.hpp"

using namespace rodhom;

namespace {

const Model& model() {
    static const Model m = build_model(two_phase_profile(5.0), make_product_mesh(build_rectangle(1.0, 4, 4), 4));
    return m;
}

ExperimentConfig small_config() {
    ExperimentConfig c = ExperimentConfig::defaults();
    c.loads = 2;
    return c;
}

LineField random_line(int N, double eps, unsigned seed) {
    const auto& mesh = model().f().mesh();
    LineField f = make_line_field(N, mesh.n_y, eps, mesh.n2());
    std::mt19937 g(seed);
    std::normal_distribution<double> d;
    for (Eigen::Index i = 0; i < f.values.rows(); ++i)
        for (Eigen::Index j = 0; j < f.values.cols(); ++j) f.values(i, j) = cplx(d(g), d(g));
    return f;
}

cplx inner(const LineField& f, const LineField& g) {
    const SpMat& M2 = model().f().M2();
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
    return s;
}

}  // namespace

TEST_CASE("config json round trip and validation") {
    const ExperimentConfig c = ExperimentConfig::defaults();
    const ExperimentConfig d = ExperimentConfig::from_json(c.to_json());
    CHECK(d.to_json() == c.to_json());
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"bogus", 1}}), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"gamma", -2.0}}), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"delta", -0.1}}), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"N_grid", {8, 16, 32}}}), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"order", 2}}), InvalidArgument);
    CHECK_NOTHROW(ExperimentConfig::from_json({{"order", 2}, {"regimes", {"stretch", "bend"}}}));
    const ExperimentConfig h = ExperimentConfig::from_json({{"material", {{"preset", "homogeneous"}, {"lambda", 2.0}}}});
    CHECK(material_from_json(h.material).evaluate(0.0)(0, 0, 0, 0) == doctest::Approx(4.0));
    const auto eps = c.eps_grid();
    CHECK(eps.front() == doctest::Approx(c.L / 8));
}

TEST_CASE("theoretical slopes and thresholds") {
    const ExperimentFlags f;
    CHECK(theory_slope(0, RodRegime::General, Component::InPlane, 0, 0, f) == doctest::Approx(0.5));
    CHECK(theory_slope(0, RodRegime::General, Component::Axial, 0, 0, f) == doctest::Approx(1.0));
    CHECK(theory_slope(0, RodRegime::Stretch, Component::All, 0, 0, f) == doctest::Approx(1.0));
    CHECK(theory_slope(0, RodRegime::Bend, Component::Axial, 0, 1.0, f) == doctest::Approx(0.5));
    CHECK(theory_slope(1, RodRegime::Stretch, Component::All, 0, 0, f) == doctest::Approx(1.0));
    CHECK(theory_slope(1, RodRegime::Stretch, Component::All, 2, 0, f) == doctest::Approx(2.0));
    CHECK(theory_slope(2, RodRegime::Stretch, Component::All, 0, 0, f) == doctest::Approx(2.0));
    CHECK(theory_slope(2, RodRegime::Bend, Component::InPlane, 0, 0, f) == doctest::Approx(1.0));
    CHECK(theory_slope(2, RodRegime::Bend, Component::Axial, 0, 0, f) == doctest::Approx(1.5));
    ExperimentFlags m0;
    m0.m0 = true;
    CHECK(theory_slope(0, RodRegime::Bend, Component::Axial, 0, 0, m0) == doctest::Approx(0.5));
    ExperimentFlags s;
    s.s_inf = true;
    CHECK(theory_slope(0, RodRegime::Bend, Component::Axial, 0, 1.0, s) == doctest::Approx(1.0));
    CHECK(slope_threshold(0.5, 0.1) == doctest::Approx(0.4));
    CHECK(slope_threshold(1.0, 0.1) == doctest::Approx(0.9));
    CHECK(slope_threshold(1.5, 0.1) == doctest::Approx(1.35));
    CHECK(slope_threshold(2.0, 0.1) == doctest::Approx(1.8));
}

TEST_CASE("zero loads give zero resolvents") {
    const ExperimentConfig c = small_config();
    const auto& mesh = model().f().mesh();
    const LineField z = make_line_field(8, mesh.n_y, c.L / 8, mesh.n2());
    for (RodRegime r : {RodRegime::General, RodRegime::Stretch, RodRegime::Bend})
        CHECK(limit_resolvent(model(), c, z.eps, z, r).values.norm() == 0.0);
    CHECK(reference_resolvent(model(), c, z.eps, z).values.norm() == 0.0);
}

TEST_CASE("zero-frequency mode solves with the mass matrix only") {
    const ExperimentConfig c = small_config();
    const auto& section = model().f().mesh().section;
    LineField f = random_line(8, c.L / 8, 1);
    for (int s = 1; s < f.slabs(); ++s) f.values.col(s) = f.values.col(0);
    const LineField u = limit_resolvent(model(), c, f.eps, f, RodRegime::General);
    LineMoments m = momentum_real(f, Which::Rod, section, model().f().M2());
    const CVec4 mhat = model().C_rod.cast<cplx>().inverse() * CVec4(m.values.col(0));
    for (int s = 0; s < f.slabs(); ++s) m.values.col(s) = mhat;
    const LineField expect = momentum_adjoint(m, f, section);
    CHECK(max_abs_diff(u, expect) <= 1e-12 * expect.values.cwiseAbs().maxCoeff());
}

TEST_CASE("single-frequency stretch load matches the 2x2 hand computation") {
    ExperimentConfig c = small_config();
    const auto& mesh = model().f().mesh();
    const int N = 8;
    LineField f = make_line_field(N, mesh.n_y, c.L / N, mesh.n2());
    const double theta = 2.0 * M_PI / c.L;
    for (int s = 0; s < f.slabs(); ++s)
        for (int a = 0; a < f.n2; ++a) f.values(3 * a + 2, s) = std::exp(cplx(0.0, theta * f.x3(s)));
    const LineField u = limit_resolvent(model(), c, f.eps, f, RodRegime::Stretch);
    const Eigen::Matrix2d& A = model().rod.A_stretch;
    const double a = theta * theta * A(0, 0) + model().C_rod(2, 2), b = theta * theta * A(0, 1);
    const double cc = theta * theta * A(1, 0), d = theta * theta * A(1, 1) + model().C_rod(3, 3);
    const double det = a * d - b * cc;
    const double m3 = -b / det, m4 = a / det;
    double err = 0.0;
    for (int s = 0; s < f.slabs(); ++s) {
        const cplx e = std::exp(cplx(0.0, theta * f.x3(s)));
        for (int i = 0; i < f.n2; ++i) {
            const Vec2& x = mesh.section.nodes[i];
            err = std::max(err, std::abs(u.values(3 * i + 0, s) - x.y() * m3 * e));
            err = std::max(err, std::abs(u.values(3 * i + 1, s) + x.x() * m3 * e));
            err = std::max(err, std::abs(u.values(3 * i + 2, s) - m4 * e));
        }
    }
    CHECK(err < 1e-12);
}

TEST_CASE("reference resolvent: energy bound, self-adjointness, single fiber") {
    const ExperimentConfig c = small_config();
    const int N = 8;
    const double eps = c.L / N;
    const LineField f = random_line(N, eps, 2), g = random_line(N, eps, 3);
    const LineField Rf = reference_resolvent(model(), c, eps, f);
    const LineField Rg = reference_resolvent(model(), c, eps, g);
    const SpMat& M2 = model().f().M2();
    CHECK(line_l2_norm(Rf, M2) <= line_l2_norm(f, M2));
    const double scale = std::sqrt(std::abs(inner(f, f) * inner(g, g)));
    CHECK(std::abs(inner(Rf, g) - inner(f, Rg)) <= 1e-10 * scale);

    FiberBundle b = make_load(model(), c, N, 0);
    for (std::size_t i = 0; i < b.fibers.size(); ++i)
        if (b.k[i] != 1) b.fibers[i].setZero();
    const FiberBundle out = gelfand(reference_resolvent(model(), c, eps, gelfand_inverse(b)));
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < out.fibers.size(); ++i) {
        total += out.fibers[i].squaredNorm();
        if (out.k[i] != 1) outside += out.fibers[i].squaredNorm();
    }
    CHECK(total > 0.0);
    CHECK(std::sqrt(outside / total) < 1e-12);
}

TEST_CASE("line limit resolvent equals the fiberwise homogenised solves") {
    ExperimentConfig c = small_config();
    CHECK(line_fiber_consistency(model(), c, 8) < 1e-10);
    c.gamma = 2.0;
    CHECK(line_fiber_consistency(model(), c, 12) < 1e-10);
}

TEST_CASE("load family is unit-norm, band-limited and N-independent in profile") {
    const ExperimentConfig c = small_config();
    for (int N : {8, 16}) {
        const FiberBundle b = make_load(model(), c, N, 1);
        CHECK(bundle_l2_norm(b, model().f().M2()) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < b.k.size(); ++i)
            if (std::abs(b.k[i]) > c.load_band) CHECK(b.fibers[i].norm() == 0.0);
    }
    const FiberBundle a = make_load(model(), c, 8, 1), b = make_load(model(), c, 16, 1);
    auto fiber = [](const FiberBundle& x, int k) {
        for (std::size_t i = 0; i < x.k.size(); ++i)
            if (x.k[i] == k) return x.fibers[i];
        return CVec();
    };
    CHECK((fiber(a, 1) - fiber(b, 1)).norm() < 1e-14);
}

TEST_CASE("rate report output layout") {
    RateReport r;
    r.name = "demo";
    RateEntry e;
    e.regime = "stretch";
    e.component = "all";
    e.eps = {0.5, 0.25, 0.125, 0.0625};
    e.err = {1.0, 0.5, 0.25, 0.125};
    e.slope_theory = 1.0;
    finalise_entry(e, 0.1, 1e-9);
    CHECK(e.pass);
    CHECK(e.slope_fit == doctest::Approx(1.0));
    r.entries.push_back(e);
    RateEntry low = e;
    low.err.back() = 1e-12;
    finalise_entry(low, 0.1, 1e-9);
    CHECK_FALSE(low.conclusive);
    CHECK_FALSE(low.pass);
    const auto path = std::filesystem::temp_directory_path() / "rodhom_rates_test.csv";
    write_rates_csv({r}, path);
    std::ifstream in(path);
    std::string first, header;
    std::getline(in, first);
    std::getline(in, header);
    CHECK(first.rfind("#", 0) == 0);
    CHECK(header == "regime,component,order,flags,eps,err,slope_fit,slope_theory,pass");
    std::filesystem::remove(path);
}

TEST_CASE("homogenised json keys") {
    const nlohmann::json j = homogenized_json(model());
    for (const char* k : {"A_rod", "A_bend", "A_stretch", "eta", "c1", "c2"}) CHECK(j.contains(k));
}
