#include "rodhom/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace rodhom {

namespace {

const double kGauss = 1.0 / std::sqrt(3.0);

// Integrates g over every element with 2x2 Gauss quadrature of the bilinear map.
template <class F>
void integrate(const CrossSectionMesh& m, F&& g) {
    for (const auto& e : m.elements) {
        for (int qa = 0; qa < 2; ++qa)
            for (int qb = 0; qb < 2; ++qb) {
                const double xi = qa ? kGauss : -kGauss;
                const double et = qb ? kGauss : -kGauss;
                const double n[4] = {0.25 * (1 - xi) * (1 - et), 0.25 * (1 + xi) * (1 - et),
                                     0.25 * (1 + xi) * (1 + et), 0.25 * (1 - xi) * (1 + et)};
                const double dxi[4] = {-0.25 * (1 - et), 0.25 * (1 - et), 0.25 * (1 + et),
                                       -0.25 * (1 + et)};
                const double det[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi),
                                       0.25 * (1 - xi)};
                Vec2 x = Vec2::Zero();
                Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
                for (int k = 0; k < 4; ++k) {
                    const Vec2& p = m.nodes[e[k]];
                    x += n[k] * p;
                    jac.col(0) += dxi[k] * p;
                    jac.col(1) += det[k] * p;
                }
                g(x, jac.determinant());
            }
    }
}

}  // namespace

double CrossSectionMesh::area() const {
    double a = 0.0;
    for (double v : areas) a += v;
    return a;
}

void update_areas(CrossSectionMesh& m) {
    m.areas.assign(m.elements.size(), 0.0);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const auto& q = m.elements[e];
        double a = 0.0;
        for (int k = 0; k < 4; ++k) {
            const Vec2& p = m.nodes[q[k]];
            const Vec2& r = m.nodes[q[(k + 1) % 4]];
            a += p.x() * r.y() - r.x() * p.y();
        }
        if (!(a > 0.0)) throw InvalidArgument("degenerate or clockwise element");
        m.areas[e] = 0.5 * a;
    }
}

RawMoments raw_moments(const CrossSectionMesh& m) {
    RawMoments r{0, 0, 0, 0, 0, 0};
    integrate(m, [&](const Vec2& x, double w) {
        r.area += w;
        r.x1 += w * x.x();
        r.x2 += w * x.y();
        r.x1x1 += w * x.x() * x.x();
        r.x2x2 += w * x.y() * x.y();
        r.x1x2 += w * x.x() * x.y();
    });
    return r;
}

void normalise(CrossSectionMesh& m) {
    update_areas(m);
    RawMoments r = raw_moments(m);
    const Vec2 c(r.x1 / r.area, r.x2 / r.area);
    for (auto& p : m.nodes) p -= c;
    r = raw_moments(m);
    Eigen::Matrix2d s;
    s << r.x1x1, r.x1x2, r.x1x2, r.x2x2;
    if (std::abs(r.x1x2) > 1e-14 * (r.x1x1 + r.x2x2)) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
        Eigen::Matrix2d q = es.eigenvectors();
        if (q.determinant() < 0) q.col(1) *= -1.0;
        for (auto& p : m.nodes) p = q.transpose() * p;
    }
    const double scale = 1.0 / std::sqrt(r.area);
    for (auto& p : m.nodes) p *= scale;
    update_areas(m);
}

CrossSectionMesh build_rectangle(double aspect, int nx, int ny) {
    if (!(aspect > 0.0)) throw InvalidArgument("aspect must be positive");
    if (nx < 2 || ny < 2) throw InvalidArgument("rectangle mesh needs nx, ny >= 2");
    CrossSectionMesh m;
    const double a = std::sqrt(aspect), b = 1.0 / std::sqrt(aspect);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.emplace_back(-0.5 * a + a * i / nx, -0.5 * b + b * j / ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int n0 = j * (nx + 1) + i;
            m.elements.push_back({n0, n0 + 1, n0 + nx + 2, n0 + nx + 1});
        }
    normalise(m);
    return m;
}

MomentData compute_moments(const CrossSectionMesh& m, double chi) {
    const RawMoments r = raw_moments(m);
    MomentData d;
    d.c1 = r.x1x1;
    d.c2 = r.x2x2;
    d.C_stretch = Eigen::Vector2d(d.c1 + d.c2, 1.0).asDiagonal();
    d.C_bend = Eigen::Vector2d(1.0 + chi * chi * d.c1, 1.0 + chi * chi * d.c2).asDiagonal();
    d.C_rod = Mat4::Zero();
    d.C_rod.topLeftCorner<2, 2>().setIdentity();
    d.C_rod.bottomRightCorner<2, 2>() = d.C_stretch;
    d.C_rod_chi = d.C_rod;
    d.C_rod_chi.topLeftCorner<2, 2>() = d.C_bend;
    return d;
}

SymmetryInfo is_centrally_symmetric(const CrossSectionMesh& m, double tol) {
    SymmetryInfo info;
    const int n = m.num_nodes();
    info.pairing.assign(n, -1);
    // Bucket nodes on a grid of width tol so that lookups are near-linear.
    const double h = std::max(tol, 1e-14) * 4.0;
    std::map<std::pair<long long, long long>, std::vector<int>> buckets;
    auto key = [h](const Vec2& p) {
        return std::make_pair(static_cast<long long>(std::floor(p.x() / h)),
                              static_cast<long long>(std::floor(p.y() / h)));
    };
    for (int a = 0; a < n; ++a) buckets[key(m.nodes[a])].push_back(a);
    for (int a = 0; a < n; ++a) {
        const Vec2 q = -m.nodes[a];
        const auto k = key(q);
        for (long long dx = -1; dx <= 1 && info.pairing[a] < 0; ++dx)
            for (long long dy = -1; dy <= 1 && info.pairing[a] < 0; ++dy) {
                auto it = buckets.find({k.first + dx, k.second + dy});
                if (it == buckets.end()) continue;
                for (int b : it->second)
                    if ((m.nodes[b] - q).norm() <= tol) {
                        info.pairing[a] = b;
                        break;
                    }
            }
        if (info.pairing[a] < 0) {
            info.pairing.clear();
            return info;
        }
    }
    // Elements must map onto elements.
    std::map<std::array<int, 4>, int> elems;
    for (const auto& e : m.elements) {
        auto s = e;
        std::sort(s.begin(), s.end());
        elems[s] = 1;
    }
    for (const auto& e : m.elements) {
        std::array<int, 4> s{info.pairing[e[0]], info.pairing[e[1]], info.pairing[e[2]],
                             info.pairing[e[3]]};
        std::sort(s.begin(), s.end());
        if (!elems.count(s)) {
            info.pairing.clear();
            return info;
        }
    }
    info.symmetric = true;
    return info;
}

ProductMesh make_product_mesh(CrossSectionMesh section, int n_y) {
    if (n_y < 2) throw InvalidArgument("n_y must be at least 2");
    ProductMesh p;
    p.section = std::move(section);
    p.n_y = n_y;
    return p;
}

ProductMesh geometry_from_json(const nlohmann::json& j) {
    const auto& r = j.at("cross_section").at("rectangle");
    return make_product_mesh(build_rectangle(r.value("aspect", 1.0), r.at("nx").get<int>(),
                                             r.at("ny").get<int>()),
                             j.at("n_y").get<int>());
}

nlohmann::json geometry_to_json(int nx, int ny, double aspect, int n_y) {
    return {{"cross_section", {{"rectangle", {{"aspect", aspect}, {"nx", nx}, {"ny", ny}}}}},
            {"n_y", n_y}};
}

std::string mesh_hash(const ProductMesh& m) {
    std::uint64_t h = kFnvOffset;
    char buf[64];
    for (const auto& p : m.section.nodes) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e;", p.x(), p.y());
        fnv1a_feed(h, buf);
    }
    for (const auto& e : m.section.elements) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d;", e[0], e[1], e[2], e[3]);
        fnv1a_feed(h, buf);
    }
    std::snprintf(buf, sizeof buf, "ny=%d", m.n_y);
    fnv1a_feed(h, buf);
    return fnv1a_hex(h);
}

}  // namespace rodhom
