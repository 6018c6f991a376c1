#include "rodhom/homogenize.hpp"

#include <cmath>

namespace rodhom {

Mat3 j_matrix(const Vec4& m, const Vec2& x) {
    Mat3 j = Mat3::Zero();
    j(2, 2) = -x.x() * m(0) - x.y() * m(1) + m(3);
    j(0, 2) = j(2, 0) = 0.5 * x.y() * m(2);
    j(1, 2) = j(2, 1) = -0.5 * x.x() * m(2);
    return j;
}

CMat3 lambda_matrix(double chi, const Vec4& m, const Vec2& x) {
    const Vec4 mb(m(0), m(1), 0.0, 0.0), ms(0.0, 0.0, m(2), m(3));
    const cplx ic(0.0, chi);
    return (ic * ic) * j_matrix(mb, x).cast<cplx>() + ic * j_matrix(ms, x).cast<cplx>();
}

CVec j_profile(const ProductMesh& mesh, const CVec4& m) {
    return interpolate(mesh, [&](const Vec2& x, double) {
        return std::array<cplx, 3>{x.y() * m(2), -x.x() * m(2),
                                   -m(0) * x.x() - m(1) * x.y() + m(3)};
    });
}

CVec bernoulli_navier(const ProductMesh& mesh, const CVec4& m, double chi) {
    const cplx ic(0.0, chi);
    return interpolate(mesh, [&](const Vec2& x, double) {
        return std::array<cplx, 3>{m(0) + x.y() * m(2), m(1) - x.x() * m(2),
                                   -ic * (m(0) * x.x() + m(1) * x.y()) + m(3)};
    });
}

CVec solve_cell(const AssembledForms& forms, const Vec4& m, SolveInfo* info) {
    const CVec w = j_profile(forms.mesh(), m.cast<cplx>());
    const CVec load = -(forms.G().cast<cplx>() * w);
    return solve_constrained(forms, 1.0, load, ConstraintSet::make(forms, ConstraintSet::Kind::H),
                             info);
}

CVec solve_cell_chi(const AssembledForms& forms, double chi, const CVec4& m,
                    ConstraintSet::Kind kind, SolveInfo* info) {
    // S* A Lambda_m with Lambda_m = (S + X) I_chi m, which vanishes at chi = 0.
    if (chi == 0.0) {
        if (info) *info = SolveInfo{};
        return CVec::Zero(forms.num_dofs());
    }
    const CVec im = bernoulli_navier(forms.mesh(), m, chi);
    const CVec load = -(forms.Kss() * im + cplx(0.0, chi) * (forms.G() * im));
    return solve_constrained(forms, 1.0, load, ConstraintSet::make(forms, kind), info);
}

RodTensor rod_tensor(const AssembledForms& forms) {
    RodTensor r;
    const auto& mesh = forms.mesh();
    std::array<CVec, 4> w;
    for (int k = 0; k < 4; ++k) {
        w[k] = j_profile(mesh, CVec4::Unit(k));
        r.correctors[k] = solve_cell(forms, Vec4::Unit(k));
    }
    Mat4 a;
    for (int m = 0; m < 4; ++m) {
        const CVec stress = forms.H() * w[m] + forms.G().transpose() * r.correctors[m];
        for (int d = 0; d < 4; ++d) a(d, m) = std::real(w[d].dot(stress));
    }
    const double scale = a.norm();
    r.symmetry_residual = (a - a.transpose()).norm() / scale;
    r.A_rod = 0.5 * (a + a.transpose());
    r.A_bend = r.A_rod.topLeftCorner<2, 2>();
    r.A_stretch = r.A_rod.bottomRightCorner<2, 2>();
    r.coupling = r.A_rod.topRightCorner<2, 2>().norm() / scale;
    r.eta = Eigen::SelfAdjointEigenSolver<Mat4>(r.A_rod).eigenvalues()(0);
    return r;
}

RodTensor rod_tensor(const MaterialProfile& profile, const ProductMesh& mesh) {
    return rod_tensor(assemble(profile, mesh));
}

CMat4 scaling_matrix(double chi) {
    CMat4 p = CMat4::Zero();
    p(0, 0) = p(1, 1) = -chi * chi;
    p(2, 2) = p(3, 3) = cplx(0.0, chi);
    return p;
}

CMat4 chi_tensor_from_scaling(const Mat4& A_rod, double chi) {
    const CMat4 p = scaling_matrix(chi);
    return p.adjoint() * A_rod.cast<cplx>() * p;
}

ChiTensor chi_tensor(const AssembledForms& forms, double chi) {
    ChiTensor t;
    t.chi = chi;
    const auto& mesh = forms.mesh();
    const cplx ic(0.0, chi);
    std::array<CVec, 4> im;
    for (int k = 0; k < 4; ++k) {
        im[k] = bernoulli_navier(mesh, CVec4::Unit(k), chi);
        t.correctors[k] = solve_cell_chi(forms, chi, CVec4::Unit(k));
    }
    const SpMat& kss = forms.Kss();
    const SpMat& g = forms.G();
    const SpMat& h = forms.H();
    for (int m = 0; m < 4; ++m) {
        // (S + X)* A (Lambda_m + S u1_m), with Lambda_m = S I m + X I m.
        const CVec s = im[m] + t.correctors[m];
        const CVec stress = kss * s - ic * (g.transpose() * s) + ic * (g * im[m]) +
                            (chi * chi) * (h * im[m]);
        for (int d = 0; d < 4; ++d) t.A_chi(d, m) = im[d].dot(stress);
    }
    const double scale = std::max(t.A_chi.norm(), 1e-300);
    t.hermitian_residual = (t.A_chi - t.A_chi.adjoint()).norm() / scale;
    t.A_chi = 0.5 * (t.A_chi + t.A_chi.adjoint()).eval();
    return t;
}

CVec4 to_rod(const CVec& m, Which which) {
    CVec4 r = CVec4::Zero();
    switch (which) {
        case Which::Rod:
            r = m;
            break;
        case Which::Bend:
            r(0) = m(0);
            r(1) = m(1);
            break;
        case Which::Stretch:
            r(2) = m(0);
            r(3) = m(1);
            break;
    }
    return r;
}

CVec from_rod(const CVec4& m, Which which) {
    switch (which) {
        case Which::Bend:
            return CVec(m.head<2>());
        case Which::Stretch:
            return CVec(m.tail<2>());
        case Which::Rod:
        default:
            return CVec(m);
    }
}

CorrectorMap::CorrectorMap(const AssembledForms& forms, Which regime, double chi)
    : regime_(regime) {
    const auto kind = regime == Which::Rod      ? ConstraintSet::Kind::H
                      : regime == Which::Bend   ? ConstraintSet::Kind::HBend
                                                : ConstraintSet::Kind::HStretch;
    for (int k = 0; k < 4; ++k) {
        const bool used = regime == Which::Rod || (regime == Which::Bend ? k < 2 : k >= 2);
        basis_[k] = used ? solve_cell_chi(forms, chi, CVec4::Unit(k), kind)
                         : CVec::Zero(forms.num_dofs()).eval();
    }
}

CorrectorMap::CorrectorMap(const ChiTensor& tensor, Which regime)
    : regime_(regime), basis_(tensor.correctors) {}

CVec CorrectorMap::operator()(const CVec& m) const {
    const CVec4 r = to_rod(m, regime_);
    CVec u = CVec::Zero(basis_[0].size());
    for (int k = 0; k < 4; ++k)
        if (r(k) != 0.0) u += r(k) * basis_[k];
    return u;
}

CorrectorMap corrector_map_B1(const AssembledForms& forms, Which regime, double chi) {
    return CorrectorMap(forms, regime, chi);
}

}  // namespace rodhom
