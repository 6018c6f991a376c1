#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "rodhom/common.hpp"

namespace rodhom {

struct CrossSectionMesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 4>> elements;  // counter-clockwise quadrilaterals
    std::vector<double> areas;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }
    double area() const;
};

// Translate to the centroid, rotate to principal axes and scale to unit area.
void normalise(CrossSectionMesh& m);
void update_areas(CrossSectionMesh& m);

CrossSectionMesh build_rectangle(double aspect, int nx, int ny);

struct MomentData {
    double c1 = 0.0;  // integral of x1^2
    double c2 = 0.0;  // integral of x2^2
    Eigen::Matrix2d C_stretch;
    Eigen::Matrix2d C_bend;  // at the requested chi
    Mat4 C_rod;              // identity bending block
    Mat4 C_rod_chi;
};

// First and second moments of the cross-section with exact bilinear quadrature.
struct RawMoments {
    double area, x1, x2, x1x1, x2x2, x1x2;
};
RawMoments raw_moments(const CrossSectionMesh& m);
MomentData compute_moments(const CrossSectionMesh& m, double chi);

struct SymmetryInfo {
    bool symmetric = false;
    std::vector<int> pairing;  // node a maps to pairing[a] at -x
};
SymmetryInfo is_centrally_symmetric(const CrossSectionMesh& m, double tol = 1e-10);

// Periodic product mesh of omega x Y with uniform y-cells. Node (a, j) sits at
// (x_a, y_j) with y_j = -1/2 + j/n_y, j = 0..n_y-1; the plane y = 1/2 is
// identified with j = 0.
struct ProductMesh {
    CrossSectionMesh section;
    int n_y = 0;

    int n2() const { return section.num_nodes(); }
    int num_nodes() const { return n2() * n_y; }
    int num_dofs() const { return 3 * num_nodes(); }
    int node(int a, int j) const { return ((j % n_y + n_y) % n_y) * n2() + a; }
    double y(int j) const { return -0.5 + static_cast<double>(j) / n_y; }
    // Node index reached when stepping from level n_y - 1 to the top plane y = 1/2.
    int periodic_partner(int a) const { return node(a, n_y); }
};

ProductMesh make_product_mesh(CrossSectionMesh section, int n_y);

ProductMesh geometry_from_json(const nlohmann::json& j);
nlohmann::json geometry_to_json(int nx, int ny, double aspect, int n_y);

// Content hash of node coordinates and connectivity.
std::string mesh_hash(const ProductMesh& m);

}  // namespace rodhom
