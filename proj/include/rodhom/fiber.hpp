#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rodhom/homogenize.hpp"
#include "rodhom/transform.hpp"

namespace rodhom {

enum class Regime { Stretch, Bend, General2, General4 };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);
// Power p of |chi| in the natural prefactor t = |chi|^{-p}.
int regime_power(Regime r);

// Fiber-level operators at one quasimomentum: Bernoulli-Navier embedding,
// complex momentum, first-order correctors and the split blocks
//   SS = S*AS, SX = S*AX, XS = X*AS, XX = X*AX
// of the shifted form K(chi) = SS + SX + XS + XX.
class FiberContext {
public:
    FiberContext(const AssembledForms& forms, double chi);

    const AssembledForms& forms() const { return forms_; }
    double chi() const { return chi_; }
    const ChiTensor& tensor() const { return tensor_; }
    const CMat4& A() const { return tensor_.A_chi; }
    // Gram matrix of the embedding, int I m . conj(I d).
    const CMat4& C() const { return C_; }
    bool symmetric() const { return symmetry_.symmetric; }
    const std::vector<int>& pairing() const { return symmetry_.pairing; }

    CVec embed(const CVec4& m) const;
    // (I e_k)^H M f for k = 1..4.
    CVec4 momentum(const CVec& f) const;
    CVec b1(const CVec4& m) const;

    CVec SS(const CVec& u) const;
    CVec SX(const CVec& v) const;
    CVec XS(const CVec& u) const;
    CVec XX(const CVec& v) const;
    // X*A Lambda_m with Lambda_m = (S + X) I m.
    CVec LX(const CVec4& m) const;
    CVec mass(const CVec& u) const;
    // Coefficients of d -> <S u + X v, Lambda_d>, conjugate-linear in d.
    CVec4 pair_lambda(const CVec& u, const CVec& v) const;
    // Coefficients of c -> <S u + X v, X (c, 0)> for constant in-plane c.
    CVec4 pair_x(const CVec& u, const CVec& v) const;

    // Solves t Kss u = rhs in H. The kernel residual max_i |w_i . rhs| / |w_i| is
    // recorded relative to `scale` and must not exceed 1e-8.
    CVec cell_solve(double t, const CVec& rhs, double scale, double* residual) const;

private:
    const AssembledForms& forms_;
    double chi_;
    ChiTensor tensor_;
    std::array<CVec, 4> basis_;  // I e_k
    std::array<CVec, 4> mbasis_; // M I e_k
    std::array<CVec, 2> inplane_; // constant unit in-plane fields
    CMat4 C_;
    SymmetryInfo symmetry_;
};

// 2- (stretch, bend) or 4-vector (rod).
CVec fiber_momentum(const FiberContext& ctx, const CVec& f, Which which);
CVec embed(const FiberContext& ctx, const CVec& m, Which which);

struct FiberProblem {
    double chi = 0.0;
    double t = 1.0;
    cplx c = 1.0;
    Regime regime = Regime::Stretch;
    CVec f;
    Scaling scaling;
    // Bend chain with the identity in place of the embedding Gram matrix.
    bool bend_identity = false;
};

// Load after scaling and, for the stretch and bend regimes, projection onto
// the matching invariant subspace.
CVec prepare_load(const FiberContext& ctx, const FiberProblem& p);

// Solves (t K(chi) + c M) u = M F with the prepared load.
CVec reference_solve(const FiberContext& ctx, const FiberProblem& p);

struct ChainStep {
    std::string name;
    double kernel_residual = 0.0;
};

// Asymptotic construction at one fiber. Level k stores the k-th refinement
// (m^(k), u0^(k), u1^(k), u2^(k), u3^(k)); u3 is used by the bend chain only.
struct ApproximationChain {
    Regime regime = Regime::Stretch;
    double chi = 0.0;
    double t = 0.0;
    cplx c = 1.0;
    CVec load;
    std::vector<CVec4> m;
    std::vector<CVec> u0, u1, u2, u3;
    std::vector<ChainStep> steps;

    // Fiber approximants: 0 -> u0, 1 -> u0 + u0^(1) + u1.
    CVec approximant(int order) const;
    // Approximants in the eps-scaling: 0 -> u0, 1 -> u0 + u1, 2 -> u0 + u1 + u0^(1).
    CVec eps_approximant(int order) const;
    double max_kernel_residual() const;
};

ApproximationChain build_chain(const FiberContext& ctx, const FiberProblem& p);
// With leading_only only m, u0 = I m and u1 = B1 m are built.
ApproximationChain build_chain(const FiberContext& ctx, const FiberProblem& p, bool leading_only);

struct RateRow {
    double chi = 0.0;
    Component component = Component::All;
    int order = 0;
    double err_l2 = 0.0;
    double err_h1 = 0.0;
};

std::string to_string(Component c);

// Errors of the order-0 and order-1 approximants; componentwise splits the
// in-plane and axial parts.
std::vector<RateRow> error_report(const FiberContext& ctx, const ApproximationChain& chain,
                                  const CVec& reference, bool componentwise);

// Least-squares slope of log y against log x; needs at least 4 points.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct RayleighReport {
    double chi = 0.0;
    double bend_max = 0.0;        // max quotient over V^bend
    double stretch_max = 0.0;     // max quotient over V^stretch
    double complement_min = 0.0;  // min quotient M-orthogonal to both
};

RayleighReport rayleigh_bounds(const FiberContext& ctx);

struct SpectrumRow {
    double chi = 0.0;
    std::vector<double> lambda;  // five smallest
};

struct SpectrumReport {
    std::vector<SpectrumRow> rows;
    // min and max over the grid of lambda_{1,2}/chi^4, lambda_{3,4}/chi^2, lambda_5.
    double bend_min = 0.0, bend_max = 0.0;
    double stretch_min = 0.0, stretch_max = 0.0;
    double rest_min = 0.0, rest_max = 0.0;
};

SpectrumReport spectrum_scaling(const AssembledForms& forms, const std::vector<double>& chis);

struct ContourReport {
    double center = 0.0;
    double radius = 0.0;
    std::vector<double> eigenvalues;
    double err_u0 = 0.0;
    double err_u1 = 0.0;
    double err_u0_1 = 0.0;  // double-pole corrector term
};

// Trapezoidal quadrature of (2 pi i)^{-1} contour integrals of g(z) times the
// z-resolvent chain terms, compared with the chain at t = eps^{-(gamma + 2)}.
// Throws ContourTooClose if an eigenvalue lies within rho0 / 2 of the circle.
ContourReport contour_quadrature_check(const FiberContext& ctx, double eps, double gamma,
                                       const CVec& f, Regime regime, int nodes = 256,
                                       double delta = 0.0);

// Smooth seeded load on the product mesh with unit L2 norm.
CVec random_smooth_load(const AssembledForms& forms, std::uint64_t seed);

struct FiberRateStudy {
    Regime regime = Regime::Stretch;
    std::vector<RateRow> rows;  // worst case over the loads, per chi
    struct Slope {
        Component component;
        int order;
        double slope_l2;
        double slope_h1;
    };
    std::vector<Slope> slopes;
    double max_kernel_residual = 0.0;
};

FiberRateStudy fiber_rate_study(const AssembledForms& forms, Regime regime,
                                const std::vector<double>& chis, int loads, std::uint64_t seed,
                                bool bend_identity = false);

}  // namespace rodhom
