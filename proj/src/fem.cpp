#include "rodhom/fem.hpp"

#include <algorithm>
#include <cmath>

namespace rodhom {

namespace {

const double kGauss = 1.0 / std::sqrt(3.0);

using Mat6x24 = Eigen::Matrix<double, 6, 24>;
using Mat24 = Eigen::Matrix<double, 24, 24>;

struct QuadPoint {
    double weight;
    double y;
    double n[8];
    double d1[8], d2[8], dy[8];
};

// Gauss points of hex (element e, y-cell j). Local node 4*l + k is corner k of
// the quadrilateral at level j + l.
std::vector<QuadPoint> hex_points(const ProductMesh& mesh, int e, int j) {
    const auto& q = mesh.section.elements[e];
    const double hy = 1.0 / mesh.n_y;
    std::vector<QuadPoint> pts;
    pts.reserve(8);
    for (int qa = 0; qa < 2; ++qa)
        for (int qb = 0; qb < 2; ++qb) {
            const double xi = qa ? kGauss : -kGauss;
            const double et = qb ? kGauss : -kGauss;
            const double n2[4] = {0.25 * (1 - xi) * (1 - et), 0.25 * (1 + xi) * (1 - et),
                                  0.25 * (1 + xi) * (1 + et), 0.25 * (1 - xi) * (1 + et)};
            const double dxi[4] = {-0.25 * (1 - et), 0.25 * (1 - et), 0.25 * (1 + et),
                                   -0.25 * (1 + et)};
            const double det[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi),
                                   0.25 * (1 - xi)};
            Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
            for (int k = 0; k < 4; ++k) {
                jac.col(0) += dxi[k] * mesh.section.nodes[q[k]];
                jac.col(1) += det[k] * mesh.section.nodes[q[k]];
            }
            const double dj = jac.determinant();
            const Eigen::Matrix2d jinv = jac.inverse();
            double g1[4], g2[4];
            for (int k = 0; k < 4; ++k) {
                // grad N = J^{-T} (dN/dxi, dN/deta)
                const Vec2 g = jinv.transpose() * Vec2(dxi[k], det[k]);
                g1[k] = g.x();
                g2[k] = g.y();
            }
            for (int qc = 0; qc < 2; ++qc) {
                const double ze = qc ? kGauss : -kGauss;
                const double l[2] = {0.5 * (1 - ze), 0.5 * (1 + ze)};
                const double dl[2] = {-1.0 / hy, 1.0 / hy};
                QuadPoint p;
                p.weight = dj * 0.5 * hy;
                p.y = mesh.y(j) + 0.5 * (1 + ze) * hy;
                for (int lv = 0; lv < 2; ++lv)
                    for (int k = 0; k < 4; ++k) {
                        const int a = 4 * lv + k;
                        p.n[a] = n2[k] * l[lv];
                        p.d1[a] = g1[k] * l[lv];
                        p.d2[a] = g2[k] * l[lv];
                        p.dy[a] = n2[k] * dl[lv];
                    }
                pts.push_back(p);
            }
        }
    return pts;
}

void strain_matrices(const QuadPoint& p, Mat6x24& bs, Mat6x24& bx) {
    bs.setZero();
    bx.setZero();
    for (int a = 0; a < 8; ++a) {
        const int c0 = 3 * a, c1 = 3 * a + 1, c2 = 3 * a + 2;
        bs(0, c0) = p.d1[a];
        bs(1, c1) = p.d2[a];
        bs(2, c2) = p.dy[a];
        bs(3, c2) = p.d2[a];
        bs(3, c1) = p.dy[a];
        bs(4, c2) = p.d1[a];
        bs(4, c0) = p.dy[a];
        bs(5, c1) = p.d1[a];
        bs(5, c0) = p.d2[a];
        bx(2, c2) = p.n[a];
        bx(3, c1) = p.n[a];
        bx(4, c0) = p.n[a];
    }
}

std::array<int, 24> hex_dofs(const ProductMesh& mesh, int e, int j) {
    const auto& q = mesh.section.elements[e];
    std::array<int, 24> d{};
    for (int lv = 0; lv < 2; ++lv)
        for (int k = 0; k < 4; ++k) {
            const int n = mesh.node(q[k], j + lv);
            for (int c = 0; c < 3; ++c) d[3 * (4 * lv + k) + c] = 3 * n + c;
        }
    return d;
}

void scatter(std::vector<Eigen::Triplet<double>>& t, const std::array<int, 24>& d,
             const Mat24& ke) {
    for (int a = 0; a < 24; ++a)
        for (int b = 0; b < 24; ++b)
            if (ke(a, b) != 0.0) t.emplace_back(d[a], d[b], ke(a, b));
}

// Scalar bilinear mass and Laplacian on the cross-section.
void section_matrices(const CrossSectionMesh& m, SpMat& mass, SpMat& lap) {
    std::vector<Eigen::Triplet<double>> tm, tk;
    for (const auto& q : m.elements) {
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
                Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
                for (int k = 0; k < 4; ++k) {
                    jac.col(0) += dxi[k] * m.nodes[q[k]];
                    jac.col(1) += det[k] * m.nodes[q[k]];
                }
                const double w = jac.determinant();
                const Eigen::Matrix2d jit = jac.inverse().transpose();
                Vec2 g[4];
                for (int k = 0; k < 4; ++k) g[k] = jit * Vec2(dxi[k], det[k]);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        tm.emplace_back(q[a], q[b], w * n[a] * n[b]);
                        tk.emplace_back(q[a], q[b], w * g[a].dot(g[b]));
                    }
            }
    }
    const int n = m.num_nodes();
    mass.resize(n, n);
    lap.resize(n, n);
    mass.setFromTriplets(tm.begin(), tm.end());
    lap.setFromTriplets(tk.begin(), tk.end());
}

// Kronecker product of a scalar matrix S on one index with the identity on
// three vector components, for node index = j * n2 + a.
SpMat vector_block(const SpMat& ny_part, const SpMat& s) {
    std::vector<Eigen::Triplet<double>> t;
    const int n2 = static_cast<int>(s.rows());
    for (int jo = 0; jo < ny_part.outerSize(); ++jo)
        for (SpMat::InnerIterator iy(ny_part, jo); iy; ++iy)
            for (int ao = 0; ao < s.outerSize(); ++ao)
                for (SpMat::InnerIterator is(s, ao); is; ++is) {
                    const int r = static_cast<int>(iy.row()) * n2 + static_cast<int>(is.row());
                    const int c = static_cast<int>(iy.col()) * n2 + static_cast<int>(is.col());
                    for (int k = 0; k < 3; ++k)
                        t.emplace_back(3 * r + k, 3 * c + k, iy.value() * is.value());
                }
    const int n = 3 * static_cast<int>(ny_part.rows()) * n2;
    SpMat out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

double max_abs_column_sum(const SpMat& a) {
    double best = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double s = 0.0;
        for (SpMat::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

AssembledForms::AssembledForms(MaterialProfile profile, ProductMesh mesh)
    : profile_(std::move(profile)), mesh_(std::move(mesh)) {
    const int n = mesh_.num_dofs();
    std::vector<Eigen::Triplet<double>> tk, tg, th;
    Mat6x24 bs, bx;
    for (int j = 0; j < mesh_.n_y; ++j)
        for (int e = 0; e < mesh_.section.num_elements(); ++e) {
            Mat24 ke = Mat24::Zero(), ge = Mat24::Zero(), he = Mat24::Zero();
            for (const auto& p : hex_points(mesh_, e, j)) {
                const Mat6& c = profile_.evaluate(p.y).voigt();
                strain_matrices(p, bs, bx);
                const Eigen::Matrix<double, 6, 24> cbs = c * bs, cbx = c * bx;
                ke.noalias() += p.weight * bs.transpose() * cbs;
                ge.noalias() += p.weight * bs.transpose() * cbx;
                he.noalias() += p.weight * bx.transpose() * cbx;
            }
            const auto d = hex_dofs(mesh_, e, j);
            scatter(tk, d, ke);
            scatter(tg, d, ge);
            scatter(th, d, he);
        }
    Kss_.resize(n, n);
    G_.resize(n, n);
    H_.resize(n, n);
    Kss_.setFromTriplets(tk.begin(), tk.end());
    G_.setFromTriplets(tg.begin(), tg.end());
    H_.setFromTriplets(th.begin(), th.end());
    SpMat symk = 0.5 * (SpMat(Kss_.transpose()) + Kss_);
    Kss_ = symk;
    SpMat symh = 0.5 * (SpMat(H_.transpose()) + H_);
    H_ = symh;

    section_matrices(mesh_.section, M2_, K2_);
    const int ny = mesh_.n_y;
    const double hy = 1.0 / ny;
    SpMat lumped(ny, ny), diff(ny, ny);
    std::vector<Eigen::Triplet<double>> tl, td;
    for (int j = 0; j < ny; ++j) {
        tl.emplace_back(j, j, hy);
        // hy * |(u_{j+1} - u_j) / hy|^2
        const int jp = (j + 1) % ny;
        td.emplace_back(j, j, 1.0 / hy);
        td.emplace_back(jp, jp, 1.0 / hy);
        td.emplace_back(j, jp, -1.0 / hy);
        td.emplace_back(jp, j, -1.0 / hy);
    }
    lumped.setFromTriplets(tl.begin(), tl.end());
    diff.setFromTriplets(td.begin(), td.end());
    M_ = vector_block(lumped, M2_);
    dy_ = vector_block(diff, M2_) + vector_block(lumped, K2_);

    W_ = Mat::Zero(n, 4);
    for (int j = 0; j < ny; ++j)
        for (int a = 0; a < mesh_.n2(); ++a) {
            const int nd = mesh_.node(a, j);
            const Vec2& x = mesh_.section.nodes[a];
            W_(3 * nd + 0, 0) = 1.0;
            W_(3 * nd + 1, 1) = 1.0;
            W_(3 * nd + 2, 2) = 1.0;
            W_(3 * nd + 0, 3) = x.y();
            W_(3 * nd + 1, 3) = -x.x();
        }
    knorm_ = max_abs_column_sum(Kss_) + max_abs_column_sum(G_) + max_abs_column_sum(H_);
}

AssembledForms assemble(const MaterialProfile& profile, const ProductMesh& mesh) {
    return AssembledForms(profile, mesh);
}

CSpMat AssembledForms::K(double chi) const {
    CSpMat k = Kss_.cast<cplx>();
    SpMat skew = G_ - SpMat(G_.transpose());
    k += cplx(0.0, chi) * skew.cast<cplx>();
    k += cplx(chi * chi, 0.0) * H_.cast<cplx>();
    return k;
}

CVec AssembledForms::apply_K(double chi, const CVec& u) const {
    CVec r = Kss_ * u;
    r += cplx(0.0, chi) * (G_ * u - G_.transpose() * u);
    r += (chi * chi) * (H_ * u);
    return r;
}

const CellSolver& AssembledForms::cell_solver() const {
    if (!cell_) cell_ = std::make_shared<CellSolver>(*this);
    return *cell_;
}

ConstraintSet ConstraintSet::make(const AssembledForms& f, Kind kind) {
    ConstraintSet cs;
    cs.kind = kind;
    const Mat& w = f.kernel_basis();
    switch (kind) {
        case Kind::H:
            cs.functionals = w;
            break;
        case Kind::HStretch:
            cs.functionals.resize(w.rows(), 2);
            cs.functionals.col(0) = w.col(2);
            cs.functionals.col(1) = -w.col(3);
            break;
        case Kind::HBend:
            cs.functionals = w.leftCols(2);
            break;
    }
    return cs;
}

CellSolver::CellSolver(const AssembledForms& forms) : forms_(forms), n_(forms.num_dofs()) {
    const Mat& w = forms.kernel_basis();
    Wn_ = w;
    for (int i = 0; i < Wn_.cols(); ++i) Wn_.col(i).normalize();
    R_ = forms.R();
    mw_ = forms.M() * w;
    gram_.compute(Mat4(w.transpose() * mw_));
    // Pinning u at one node and u1 at a node with a different x2 removes the
    // four rigid motions; the multiplier system is then recovered exactly by
    // projecting the load and the solution against the kernel.
    const auto& mesh = forms.mesh();
    int b = mesh.n2() - 1;
    const double x2a = mesh.section.nodes[0].y();
    for (int a = mesh.n2() - 1; a > 0; --a)
        if (std::abs(mesh.section.nodes[a].y() - x2a) > 1e-8) {
            b = a;
            break;
        }
    const int pins[4] = {0, 1, 2, 3 * mesh.node(b, 0)};
    map_.assign(n_, 0);
    for (int p : pins) map_[p] = -1;
    int r = 0;
    for (int i = 0; i < n_; ++i)
        if (map_[i] >= 0) map_[i] = r++;
    std::vector<Eigen::Triplet<double>> t;
    const SpMat& k = forms.Kss();
    for (int c = 0; c < k.outerSize(); ++c)
        for (SpMat::InnerIterator it(k, c); it; ++it) {
            const int ri = map_[it.row()], ci = map_[it.col()];
            if (ri >= 0 && ci >= 0) t.emplace_back(ri, ci, it.value());
        }
    SpMat a(r, r);
    a.setFromTriplets(t.begin(), t.end());
    ldlt_.compute(a);
    if (ldlt_.info() != Eigen::Success) throw SingularSystem("constrained factorisation failed");
    const Vec d = ldlt_.vectorD();
    if (d.minCoeff() <= 1e-14 * d.maxCoeff()) throw SingularSystem("constrained system is singular");
}

double CellSolver::kernel_residual(const CVec& load) const {
    const double nb = load.norm();
    if (nb == 0.0) return 0.0;
    return (Wn_.transpose().cast<cplx>() * load).cwiseAbs().maxCoeff() / nb;
}

Vec CellSolver::solve_real(const Vec& load) const {
    const Mat& w = forms_.kernel_basis();
    // Multiplier part: remove the kernel component of the load.
    const Vec b = load - mw_ * gram_.solve(w.transpose() * load);
    Vec br(ldlt_.rows());
    for (int i = 0; i < n_; ++i)
        if (map_[i] >= 0) br(map_[i]) = b(i);
    const Vec xr = ldlt_.solve(br);
    Vec x = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i)
        if (map_[i] >= 0) x(i) = xr(map_[i]);
    return x - w * gram_.solve(mw_.transpose() * x);
}

CVec CellSolver::solve(double t, const CVec& load, SolveInfo* info, double tol) const {
    const double res = kernel_residual(load);
    if (info) info->kernel_residual = res;
    if (res > tol)
        throw IncompatibleLoad("load does not annihilate the rigid-motion kernel (residual " +
                               std::to_string(res) + ")");
    CVec u(n_);
    u.real() = solve_real(load.real()) / t;
    u.imag() = solve_real(load.imag()) / t;
    if (info) {
        const double nu = std::max(u.norm(), 1e-300);
        info->constraint_residual = (R_.cast<cplx>() * u).cwiseAbs().maxCoeff() / nu;
    }
    return u;
}

CVec solve_constrained(const AssembledForms& forms, double t, const CVec& load,
                       const ConstraintSet& constraints, SolveInfo* info) {
    const double nb = load.norm();
    double res = 0.0;
    if (nb > 0.0)
        for (int i = 0; i < constraints.size(); ++i) {
            const Vec w = constraints.functionals.col(i).normalized();
            res = std::max(res, std::abs(w.cast<cplx>().dot(load)) / nb);
        }
    if (res > 1e-8)
        throw IncompatibleLoad("load does not annihilate the constrained kernel");
    // The saddle system always carries all four kernel functionals; loads in the
    // stretch or bend subspaces satisfy the remaining ones by parity.
    SolveInfo local;
    CVec u = forms.cell_solver().solve(t, load, &local, std::numeric_limits<double>::infinity());
    local.kernel_residual = res;
    if (info) *info = local;
    return u;
}

ResolventSolver::ResolventSolver(const AssembledForms& forms, double chi, double t, cplx c)
    : forms_(forms) {
    A_ = t * forms.K(chi) + c * forms.M().cast<cplx>();
    A_.makeCompressed();
    for (int k = 0; k < A_.outerSize(); ++k) {
        double col = 0.0;
        for (CSpMat::InnerIterator it(A_, k); it; ++it) col += std::abs(it.value());
        anorm_ = std::max(anorm_, col);
    }
    if (c.imag() == 0.0 && c.real() > 0.0 && t > 0.0) {
        ldlt_ = std::make_unique<Eigen::SimplicialLDLT<CSpMat>>(A_);
        if (ldlt_->info() != Eigen::Success) throw SingularSystem("resolvent factorisation failed");
    } else {
        lu_ = std::make_unique<Eigen::SparseLU<CSpMat>>();
        lu_->analyzePattern(A_);
        lu_->factorize(A_);
        if (lu_->info() != Eigen::Success) throw SingularSystem("resolvent factorisation failed");
    }
}

CVec ResolventSolver::solve(const CVec& rhs) const {
    auto direct = [&](const CVec& b) { return ldlt_ ? CVec(ldlt_->solve(b)) : CVec(lu_->solve(b)); };
    CVec u = direct(rhs);
    for (int it = 0; it < 2 && residual(u, rhs) > 1e-15; ++it) u += direct(CVec(rhs - A_ * u));
    return u;
}

CVec ResolventSolver::solve_mass_load(const CVec& f) const {
    return solve(CVec(forms_.M().cast<cplx>() * f));
}

double ResolventSolver::residual(const CVec& u, const CVec& rhs) const {
    const double scale = anorm_ * u.norm() + rhs.norm();
    const double r = (A_ * u - rhs).norm();
    return scale == 0.0 ? r : r / scale;
}

std::vector<EigenPair> smallest_eigs(const AssembledForms& forms, double chi, int k,
                                     const EigenOptions& opt) {
    const int n = forms.num_dofs();
    if (k < 1 || k > n) throw InvalidArgument("invalid eigenvalue count");
    const int b = std::min(n, k + opt.extra_block);
    const CSpMat kc = forms.K(chi);
    const CSpMat mc = forms.M().cast<cplx>();
    CSpMat shifted = kc + opt.shift * mc;
    Eigen::SimplicialLDLT<CSpMat> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("shifted eigen factorisation failed");
    // Smooth deterministic starting block: low-order polynomials times phases.
    CMat q(n, b);
    const auto& mesh = forms.mesh();
    for (int col = 0; col < b; ++col) {
        CVec v = interpolate(mesh, [&](const Vec2& x, double y) {
            const double s = std::sin(1.3 * col + 0.7) + 2.1 * x.x() * std::cos(0.9 * col) +
                             1.7 * x.y() * std::sin(1.1 * col + 0.3) +
                             std::cos(2.0 * M_PI * y * (1 + col % 3) + col);
            return std::array<cplx, 3>{cplx(s * (col % 3 == 0 ? 1.0 : 0.3), 0.1 * col),
                                       cplx(s * (col % 3 == 1 ? 1.0 : 0.4), -0.05 * col),
                                       cplx(s * (col % 3 == 2 ? 1.0 : 0.5), 0.0)};
        });
        q.col(col) = v;
    }
    CMat dm;  // M-orthonormalised deflation basis
    if (opt.deflate.cols() > 0) {
        const CMat g = opt.deflate.adjoint() * (mc * opt.deflate);
        const Eigen::LLT<CMat> llt(0.5 * (g + g.adjoint()));
        if (llt.info() != Eigen::Success) throw InvalidArgument("deflation basis is degenerate");
        dm = llt.matrixU().solve<Eigen::OnTheRight>(opt.deflate);
    }
    auto deflate = [&](CMat& z) {
        if (dm.cols() > 0) z -= dm * (dm.adjoint() * (mc * z));
    };
    // Constrained shift-invert: z = A^{-1} b - Y S^{-1} (M D)^H A^{-1} b with
    // Y = A^{-1} M D keeps z in the complement and inverts the compressed pencil.
    CMat y, mdm;
    Eigen::PartialPivLU<CMat> schur;
    if (dm.cols() > 0) {
        mdm = mc * dm;
        y.resize(n, dm.cols());
        for (int col = 0; col < dm.cols(); ++col) y.col(col) = ldlt.solve(CVec(mdm.col(col)));
        schur.compute(mdm.adjoint() * y);
    }
    deflate(q);
    const double knorm = forms.stiffness_norm() * (1.0 + chi * chi);
    std::vector<EigenPair> out;
    for (int it = 0; it < opt.max_iterations; ++it) {
        CMat mq = mc * q;
        CMat z(n, b);
        for (int col = 0; col < b; ++col) z.col(col) = ldlt.solve(CVec(mq.col(col)));
        if (dm.cols() > 0) {
            z -= y * schur.solve(CMat(mdm.adjoint() * z));
            deflate(z);
        }
        // Rayleigh-Ritz on the original pencil.
        CMat kz = kc * z;
        CMat mz = mc * z;
        CMat kr = z.adjoint() * kz;
        CMat mr = z.adjoint() * mz;
        kr = 0.5 * (kr + kr.adjoint()).eval();
        mr = 0.5 * (mr + mr.adjoint()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(kr, mr);
        if (ges.info() != Eigen::Success) throw NoConvergence("Rayleigh-Ritz step failed");
        q = z * ges.eigenvectors();
        bool done = true;
        out.clear();
        CMat kq = kc * q, mqq = mc * q;
        for (int i = 0; i < k; ++i) {
            const double lam = ges.eigenvalues()(i);
            const double nv = q.col(i).norm();
            CVec rv = kq.col(i) - lam * mqq.col(i);
            if (dm.cols() > 0) rv -= mc * (dm * (dm.adjoint() * rv));
            const double r = rv.norm() / nv;
            if (r > opt.tol * knorm) done = false;
            out.push_back({lam, q.col(i) / std::sqrt(std::real(q.col(i).dot(mqq.col(i))))});
        }
        if (done) return out;
    }
    throw NoConvergence("smallest_eigs did not converge");
}

CVec project_symmetry(const AssembledForms& forms, const CVec& u, Which which,
                      const std::vector<int>& pairing) {
    const auto& mesh = forms.mesh();
    const int n2 = mesh.n2();
    if (static_cast<int>(pairing.size()) != n2) throw PairingMismatch("pairing size mismatch");
    for (int a = 0; a < n2; ++a) {
        const int p = pairing[a];
        if (p < 0 || p >= n2 || (mesh.section.nodes[a] + mesh.section.nodes[p]).norm() > 1e-8)
            throw PairingMismatch("pairing inconsistent with node coordinates");
    }
    CVec out(u.size());
    // Bend keeps even in-plane and odd axial components; stretch the opposite.
    const double s_inplane = which == Which::Bend ? 1.0 : -1.0;
    for (int j = 0; j < mesh.n_y; ++j)
        for (int a = 0; a < n2; ++a) {
            const int n = mesh.node(a, j), m = mesh.node(pairing[a], j);
            for (int c = 0; c < 3; ++c) {
                const double s = c < 2 ? s_inplane : -s_inplane;
                out(3 * n + c) = 0.5 * (u(3 * n + c) + s * u(3 * m + c));
            }
        }
    return out;
}

CVec mask_components(const CVec& u, Component c) {
    if (c == Component::All) return u;
    CVec out = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const bool axial = i % 3 == 2;
        if ((c == Component::InPlane) == axial) out(i) = 0.0;
    }
    return out;
}

double l2_norm(const AssembledForms& forms, const CVec& u) {
    return std::sqrt(std::max(0.0, std::real(u.dot(forms.M() * u))));
}

double h1_norm(const AssembledForms& forms, const CVec& u) {
    return std::sqrt(std::max(0.0, std::real(u.dot(forms.M() * u + forms.H1y() * u))));
}

double energy_by_quadrature(const AssembledForms& forms, double chi, const CVec& u) {
    const auto& mesh = forms.mesh();
    double energy = 0.0;
    Mat6x24 bs, bx;
    for (int j = 0; j < mesh.n_y; ++j)
        for (int e = 0; e < mesh.section.num_elements(); ++e) {
            const auto d = hex_dofs(mesh, e, j);
            Eigen::Matrix<cplx, 24, 1> ue;
            for (int a = 0; a < 24; ++a) ue(a) = u(d[a]);
            for (const auto& p : hex_points(mesh, e, j)) {
                strain_matrices(p, bs, bx);
                const Eigen::Matrix<cplx, 6, 1> eps =
                    bs.cast<cplx>() * ue + cplx(0.0, chi) * (bx.cast<cplx>() * ue);
                const Mat6& c = forms.profile().evaluate(p.y).voigt();
                energy += p.weight * std::real(eps.dot(c.cast<cplx>() * eps));
            }
        }
    return energy;
}

}  // namespace rodhom
