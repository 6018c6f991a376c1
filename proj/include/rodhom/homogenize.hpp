#pragma once

#include <array>

#include "rodhom/fem.hpp"

namespace rodhom {

// Index sets of the rod coefficient vector m = (m1, m2, m3, m4).
inline constexpr std::array<int, 2> kBendIdx{0, 1};
inline constexpr std::array<int, 2> kStretchIdx{2, 3};

Mat3 j_matrix(const Vec4& m, const Vec2& x);
CMat3 lambda_matrix(double chi, const Vec4& m, const Vec2& x);

// Displacement w_m = (x2 m3, -x1 m3, -m1 x1 - m2 x2 + m4) whose y-multiplication
// strain B_X w_m is the nodal J-matrix field.
CVec j_profile(const ProductMesh& mesh, const CVec4& m);

// Bernoulli-Navier profile of the rod embedding at quasimomentum chi:
// (m1 + x2 m3, m2 - x1 m3, -i chi (m1 x1 + m2 x2) + m4).
CVec bernoulli_navier(const ProductMesh& mesh, const CVec4& m, double chi);

// Cell corrector at chi = 0: u_m in H with Kss u = -G w_m.
CVec solve_cell(const AssembledForms& forms, const Vec4& m, SolveInfo* info = nullptr);
// Corrector with Lambda data: Kss u = -S* A Lambda_{chi, m} in the given space.
CVec solve_cell_chi(const AssembledForms& forms, double chi, const CVec4& m,
                    ConstraintSet::Kind kind = ConstraintSet::Kind::H,
                    SolveInfo* info = nullptr);

struct RodTensor {
    Mat4 A_rod;
    Eigen::Matrix2d A_bend;
    Eigen::Matrix2d A_stretch;
    double eta = 0.0;                 // smallest eigenvalue of A_rod
    double symmetry_residual = 0.0;   // before symmetrisation, relative
    double coupling = 0.0;            // off-diagonal block size, relative
    std::array<CVec, 4> correctors;   // u_{e_k}
};

RodTensor rod_tensor(const AssembledForms& forms);
RodTensor rod_tensor(const MaterialProfile& profile, const ProductMesh& mesh);

struct ChiTensor {
    double chi = 0.0;
    CMat4 A_chi;
    double hermitian_residual = 0.0;
    std::array<CVec, 4> correctors;  // B1(e_k)
};

// Direct assembly from four Lambda-data correctors.
ChiTensor chi_tensor(const AssembledForms& forms, double chi);
// The linear scaling P^H A_rod P with P = diag(-chi^2, -chi^2, i chi, i chi).
CMat4 chi_tensor_from_scaling(const Mat4& A_rod, double chi);
CMat4 scaling_matrix(double chi);

// First-order corrector map m -> B1(m) for a regime at fixed chi.
class CorrectorMap {
public:
    CorrectorMap(const AssembledForms& forms, Which regime, double chi);
    CorrectorMap(const ChiTensor& tensor, Which regime);
    // m has 2 entries for bend/stretch and 4 for rod.
    CVec operator()(const CVec& m) const;
    Which regime() const { return regime_; }

private:
    Which regime_;
    std::array<CVec, 4> basis_;
};

CorrectorMap corrector_map_B1(const AssembledForms& forms, Which regime, double chi);

// Embeds a 2-vector into rod coordinates for the regime.
CVec4 to_rod(const CVec& m, Which which);
CVec from_rod(const CVec4& m, Which which);

}  // namespace rodhom
