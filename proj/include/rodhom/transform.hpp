#pragma once

#include <vector>

#include "rodhom/fem.hpp"

namespace rodhom {

// Diagonal load scalings acting on the third displacement component.
struct Scaling {
    enum class Kind { None, EpsDelta, Infinity, AbsChi };
    Kind kind = Kind::None;
    double axial = 1.0;  // multiplier of the third component

    static Scaling none() { return {}; }
    static Scaling eps_delta(double eps, double delta);
    static Scaling infinity();
    static Scaling abs_chi(double chi);
};

// Works on any vector whose entries are grouped as (u1, u2, u3) per node.
CVec apply_scaling(const CVec& u, const Scaling& s);

// Field on omega x [-eps/2, L - eps/2) sampled at N * n_y slabs
// x3(s) = eps (s / n_y - 1/2); slab s = n * n_y + j lies in period n at cell
// coordinate y_j. Column s holds the cross-section coefficients (3 * a + c).
struct LineField {
    int N = 0;
    int n_y = 0;
    double eps = 0.0;
    int n2 = 0;
    CMat values;

    int slabs() const { return N * n_y; }
    double L() const { return N * eps; }
    double x3(int s) const { return eps * (static_cast<double>(s) / n_y - 0.5); }
};

LineField make_line_field(int N, int n_y, double eps, int n2);

// Representative of q mod n in [-floor(n/2), ceil(n/2) - 1].
int centred_index(int q, int n);
// FFT along the column index of every row (unnormalised forward, 1/n inverse).
CMat fft_rows(const CMat& v, bool inverse);

// Fiber quasimomenta chi_k = 2 pi k / N, k = -floor(N/2) .. ceil(N/2) - 1.
std::vector<int> fiber_indices(int N);

struct FiberBundle {
    int N = 0;
    int n_y = 0;
    double eps = 0.0;
    int n2 = 0;
    std::vector<int> k;
    std::vector<double> chi;
    std::vector<CVec> fibers;  // product-mesh layout: 3 * (j * n2 + a) + c
};

FiberBundle gelfand(const LineField& f);
LineField gelfand_inverse(const FiberBundle& b);
// Quasiperiodic variant: Floquet fibers satisfy F = exp(i chi y) G pointwise.
FiberBundle floquet(const LineField& f);

// L2(omega x box) norm with the cross-section mass and slab width eps / n_y.
double line_l2_norm(const LineField& f, const SpMat& M2);
double bundle_l2_norm(const FiberBundle& b, const SpMat& M2);
// H1(omega x box) norm of the physical field: in-plane gradients plus forward
// differences over slabs, evaluated fiberwise with the Bloch-shifted
// difference (n_y / eps)(exp(i chi / n_y) b_{j+1} - b_j).
double bundle_h1_norm(const FiberBundle& b, const SpMat& M2, const SpMat& K2);

// Max-abs difference between Gelfand of the spectral x3-derivative and the
// fiberwise eps^{-1}(d_y + i chi) with the matching discrete d_y.
double gelfand_derivative_check(const LineField& f);
double floquet_check(const LineField& f);

// Smoothing by the sharp cutoff on the box frequencies q = -floor(N/2) ..
// ceil(N/2) - 1 (half-open band).
LineField xi_smoothing_fourier(const LineField& f);
// Same operator as inverse Gelfand of the fiberwise y-average.
LineField xi_smoothing_fiber(const LineField& f);
// Spectral x3-derivative over the box.
LineField spectral_derivative(const LineField& f);

// Line-valued moments: rows are moment components, columns slabs.
struct LineMoments {
    Which which = Which::Rod;
    CMat values;
};

// Stretch: (int x2 f1 - x1 f2, int f3). Bend: int f_hat + eps d3 int f3 x_hat.
// Rod stacks bend then stretch. With `leading_only` the bend moment drops
// the eps d3 term.
LineMoments momentum_real(const LineField& f, Which which, const CrossSectionMesh& section,
                          const SpMat& M2, bool leading_only = false);
// Adjoint of momentum_real: stretch (x2 m3, -x1 m3, m4); bend
// (m_hat, -eps x_hat . d3 m_hat).
LineField momentum_adjoint(const LineMoments& m, const LineField& like,
                           const CrossSectionMesh& section, bool leading_only = false);

// Fiber bundle of y-independent moment vectors, inverted to the line.
LineMoments moments_from_fibers(const std::vector<CVec>& fiber_moments, const FiberBundle& like,
                                Which which);

LineField apply_scaling(const LineField& f, const Scaling& s);

double max_abs_diff(const LineField& a, const LineField& b);

}  // namespace rodhom
