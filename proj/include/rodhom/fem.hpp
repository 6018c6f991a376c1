#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "rodhom/geometry.hpp"
#include "rodhom/material.hpp"

namespace rodhom {

enum class Which { Stretch, Bend, Rod };

// Components of a nodal vector field: dof = 3 * node + component.
enum class Component { All, InPlane, Axial };

class CellSolver;

// Chi-independent blocks of the fiber form on omega x Y:
//   K(chi) = Kss + i chi (G - G^T) + chi^2 H,
// where Kss = int B_S^T C B_S, G = int B_S^T C B_X, H = int B_X^T C B_X, with
// B_S the engineering symmetric gradient and B_X the multiplication by
// sym(u (x) e3). M is the mass matrix (consistent in omega, lumped in y).
class AssembledForms {
public:
    AssembledForms(MaterialProfile profile, ProductMesh mesh);

    const MaterialProfile& profile() const { return profile_; }
    const ProductMesh& mesh() const { return mesh_; }
    int num_dofs() const { return mesh_.num_dofs(); }

    const SpMat& Kss() const { return Kss_; }
    const SpMat& G() const { return G_; }
    const SpMat& H() const { return H_; }
    const SpMat& M() const { return M_; }
    const SpMat& M2() const { return M2_; }  // scalar omega mass
    const SpMat& K2() const { return K2_; }  // scalar omega Laplacian
    const SpMat& H1y() const { return dy_; }  // gradient Gram: omega Laplacian and y differences

    CSpMat K(double chi) const;
    // Rigid-motion kernel of sym grad: e1, e2, e3, (x2, -x1, 0).
    const Mat& kernel_basis() const { return W_; }
    // Rows are the mass-weighted kernel functionals W^T M.
    Mat R() const { return W_.transpose() * M_; }
    double stiffness_norm() const { return knorm_; }

    // Applies the fiber operator blocks to a field.
    CVec apply_K(double chi, const CVec& u) const;

    const CellSolver& cell_solver() const;

private:
    MaterialProfile profile_;
    ProductMesh mesh_;
    SpMat Kss_, G_, H_, M_, M2_, K2_, dy_;
    Mat W_;
    double knorm_ = 0.0;
    mutable std::shared_ptr<CellSolver> cell_;
};

AssembledForms assemble(const MaterialProfile& profile, const ProductMesh& mesh);

struct ConstraintSet {
    enum class Kind { H, HStretch, HBend };
    Kind kind = Kind::H;
    Mat functionals;  // columns: nodal weights w with functional u -> w^T M u

    static ConstraintSet make(const AssembledForms& f, Kind kind);
    int size() const { return static_cast<int>(functionals.cols()); }
};

struct SolveInfo {
    double kernel_residual = 0.0;  // max_i |w_i^T b| / (|w_i| |b|)
    double constraint_residual = 0.0;
};

// Exact solver for the multiplier system [Kss R^T; R 0] with the four kernel
// functionals, factorised once and reused for every corrector solve.
class CellSolver {
public:
    explicit CellSolver(const AssembledForms& forms);
    // Solves t Kss u = load with u in H. Throws IncompatibleLoad if the load does
    // not annihilate the kernel to within tol.
    CVec solve(double t, const CVec& load, SolveInfo* info = nullptr, double tol = 1e-8) const;
    double kernel_residual(const CVec& load) const;

private:
    Vec solve_real(const Vec& load) const;

    const AssembledForms& forms_;
    Mat Wn_;  // kernel basis with unit Euclidean columns
    Mat R_;
    Mat mw_;  // M W
    Eigen::LDLT<Mat4> gram_;
    std::vector<int> map_;  // full dof -> reduced dof, -1 when pinned
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    int n_;
};

CVec solve_constrained(const AssembledForms& forms, double t, const CVec& load,
                       const ConstraintSet& constraints, SolveInfo* info = nullptr);

// Factorised (t K(chi) + c M) for repeated reference solves.
class ResolventSolver {
public:
    ResolventSolver(const AssembledForms& forms, double chi, double t, cplx c = 1.0);
    CVec solve_mass_load(const CVec& f) const;  // returns u with (tK + cM)u = M f
    CVec solve(const CVec& rhs) const;
    // Normwise backward error |A u - rhs| / (|A|_1 |u| + |rhs|).
    double residual(const CVec& u, const CVec& rhs) const;

private:
    const AssembledForms& forms_;
    CSpMat A_;
    double anorm_ = 0.0;
    std::unique_ptr<Eigen::SimplicialLDLT<CSpMat>> ldlt_;
    std::unique_ptr<Eigen::SparseLU<CSpMat>> lu_;
};

struct EigenPair {
    double value;
    CVec vector;
};

struct EigenOptions {
    int max_iterations = 2000;
    double tol = 1e-8;
    int extra_block = 6;
    double shift = 1e-3;  // factorises K + shift * M
    CMat deflate;         // optional columns; iterates stay M-orthogonal to their span
};

std::vector<EigenPair> smallest_eigs(const AssembledForms& forms, double chi, int k,
                                     const EigenOptions& opt = {});

// Parity projections under x -> -x at fixed y.
CVec project_symmetry(const AssembledForms& forms, const CVec& u, Which which,
                      const std::vector<int>& pairing);

// Restricts a field to the selected components.
CVec mask_components(const CVec& u, Component c);

double l2_norm(const AssembledForms& forms, const CVec& u);
// H1(omega x Y) norm: L2 part, in-plane gradients and forward differences in y.
double h1_norm(const AssembledForms& forms, const CVec& u);

// Nodal field evaluated from a function of (x1, x2, y).
template <class F>
CVec interpolate(const ProductMesh& mesh, F&& f) {
    CVec u(mesh.num_dofs());
    for (int j = 0; j < mesh.n_y; ++j)
        for (int a = 0; a < mesh.n2(); ++a) {
            const auto v = f(mesh.section.nodes[a], mesh.y(j));
            const int n = mesh.node(a, j);
            for (int c = 0; c < 3; ++c) u(3 * n + c) = v[c];
        }
    return u;
}

// Strain energy recomputed element by element with the full complex strain.
double energy_by_quadrature(const AssembledForms& forms, double chi, const CVec& u);

}  // namespace rodhom
