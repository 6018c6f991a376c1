#include "rodhom/transform.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

namespace rodhom {

namespace {

int wrap(int k, int n) { return ((k % n) + n) % n; }

int centred(int q, int n) { return centred_index(q, n); }

void check_alignment(const LineField& f) {
    if (f.N < 1 || f.n_y < 1 || f.n2 < 1 || !(f.eps > 0.0))
        throw AlignmentError("line field has an invalid sampling grid");
    if (f.values.rows() != 3 * f.n2 || f.values.cols() != f.slabs())
        throw AlignmentError("line field samples do not tile whole periods");
}

double cell_y(int j, int n_y) { return -0.5 + static_cast<double>(j) / n_y; }

}  // namespace

int centred_index(int q, int n) {
    const int lo = -(n / 2);
    return wrap(q - lo, n) + lo;
}

// FFT along the slab index of every row; returns coefficients per row.
CMat fft_rows(const CMat& v, bool inverse) {
    Eigen::FFT<double> fft;
    CMat out(v.rows(), v.cols());
    CVec src(v.cols()), dst(v.cols());
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        src = v.row(r).transpose();
        if (inverse) fft.inv(dst, src);
        else fft.fwd(dst, src);
        out.row(r) = dst.transpose();
    }
    return out;
}

Scaling Scaling::eps_delta(double eps, double delta) {
    return {Kind::EpsDelta, std::pow(eps, -delta)};
}
Scaling Scaling::infinity() { return {Kind::Infinity, 0.0}; }
Scaling Scaling::abs_chi(double chi) {
    if (chi == 0.0) throw InvalidArgument("S_|chi| needs chi != 0");
    return {Kind::AbsChi, 1.0 / std::abs(chi)};
}

CVec apply_scaling(const CVec& u, const Scaling& s) {
    CVec out = u;
    for (Eigen::Index i = 2; i < out.size(); i += 3) out(i) *= s.axial;
    return out;
}

LineField apply_scaling(const LineField& f, const Scaling& s) {
    LineField out = f;
    for (Eigen::Index r = 2; r < out.values.rows(); r += 3) out.values.row(r) *= s.axial;
    return out;
}

LineField make_line_field(int N, int n_y, double eps, int n2) {
    LineField f;
    f.N = N;
    f.n_y = n_y;
    f.eps = eps;
    f.n2 = n2;
    f.values = CMat::Zero(3 * n2, N * n_y);
    return f;
}

std::vector<int> fiber_indices(int N) {
    std::vector<int> k;
    for (int i = -(N / 2); i < N - N / 2; ++i) k.push_back(i);
    return k;
}

FiberBundle gelfand(const LineField& f) {
    check_alignment(f);
    FiberBundle b;
    b.N = f.N;
    b.n_y = f.n_y;
    b.eps = f.eps;
    b.n2 = f.n2;
    b.k = fiber_indices(f.N);
    const int rows = 3 * f.n2;
    const double c = std::sqrt(f.eps / f.N);
    for (int k : b.k) {
        b.chi.push_back(2.0 * M_PI * k / f.N);
        b.fibers.emplace_back(CVec::Zero(rows * f.n_y));
    }
    for (int j = 0; j < f.n_y; ++j) {
        CMat per(rows, f.N);
        for (int n = 0; n < f.N; ++n) per.col(n) = f.values.col(n * f.n_y + j);
        const CMat hat = fft_rows(per, false);
        for (std::size_t i = 0; i < b.k.size(); ++i) {
            const cplx phase = std::exp(cplx(0.0, -b.chi[i] * cell_y(j, f.n_y)));
            b.fibers[i].segment(rows * j, rows) = (c * phase) * hat.col(wrap(b.k[i], f.N));
        }
    }
    return b;
}

LineField gelfand_inverse(const FiberBundle& b) {
    LineField f = make_line_field(b.N, b.n_y, b.eps, b.n2);
    const int rows = 3 * b.n2;
    if (static_cast<int>(b.fibers.size()) != b.N) throw AlignmentError("bundle must hold N fibers");
    const double c = std::sqrt(b.eps / b.N);
    for (int j = 0; j < b.n_y; ++j) {
        CMat hat = CMat::Zero(rows, b.N);
        for (std::size_t i = 0; i < b.k.size(); ++i) {
            const cplx phase = std::exp(cplx(0.0, b.chi[i] * cell_y(j, b.n_y)));
            hat.col(wrap(b.k[i], b.N)) = phase * b.fibers[i].segment(rows * j, rows);
        }
        // inv() divides by N, matching 1 / (c N) sum_k.
        const CMat per = fft_rows(hat, true) / c;
        for (int n = 0; n < b.N; ++n) f.values.col(n * b.n_y + j) = per.col(n);
    }
    return f;
}

FiberBundle floquet(const LineField& f) {
    check_alignment(f);
    FiberBundle b;
    b.N = f.N;
    b.n_y = f.n_y;
    b.eps = f.eps;
    b.n2 = f.n2;
    b.k = fiber_indices(f.N);
    const int rows = 3 * f.n2;
    const double c = std::sqrt(f.eps / f.N);
    for (int k : b.k) {
        const double chi = 2.0 * M_PI * k / f.N;
        b.chi.push_back(chi);
        CVec v = CVec::Zero(rows * f.n_y);
        for (int j = 0; j < f.n_y; ++j)
            for (int n = 0; n < f.N; ++n)
                v.segment(rows * j, rows) +=
                    (c * std::exp(cplx(0.0, -chi * n))) * f.values.col(n * f.n_y + j);
        b.fibers.push_back(v);
    }
    return b;
}

double line_l2_norm(const LineField& f, const SpMat& M2) {
    double s = 0.0;
    for (int col = 0; col < f.slabs(); ++col)
        for (int c = 0; c < 3; ++c) {
            CVec v(f.n2);
            for (int a = 0; a < f.n2; ++a) v(a) = f.values(3 * a + c, col);
            s += std::real(v.dot(M2 * v));
        }
    return std::sqrt(s * f.eps / f.n_y);
}

double bundle_l2_norm(const FiberBundle& b, const SpMat& M2) {
    double s = 0.0;
    for (const auto& v : b.fibers)
        for (int j = 0; j < b.n_y; ++j)
            for (int c = 0; c < 3; ++c) {
                CVec w(b.n2);
                for (int a = 0; a < b.n2; ++a) w(a) = v(3 * (j * b.n2 + a) + c);
                s += std::real(w.dot(M2 * w));
            }
    return std::sqrt(s / b.n_y);
}

double bundle_h1_norm(const FiberBundle& b, const SpMat& M2, const SpMat& K2) {
    double s = 0.0;
    const int rows = 3 * b.n2;
    auto comp = [&](const CVec& v, int j, int c) {
        CVec w(b.n2);
        for (int a = 0; a < b.n2; ++a) w(a) = v(rows * j + 3 * a + c);
        return w;
    };
    for (std::size_t i = 0; i < b.fibers.size(); ++i) {
        const CVec& v = b.fibers[i];
        const cplx shift = std::exp(cplx(0.0, b.chi[i] / b.n_y));
        for (int j = 0; j < b.n_y; ++j)
            for (int c = 0; c < 3; ++c) {
                const CVec w = comp(v, j, c);
                const CVec d = (b.n_y / b.eps) * (shift * comp(v, (j + 1) % b.n_y, c) - w);
                s += std::real(w.dot(M2 * w) + w.dot(K2 * w) + d.dot(M2 * d));
            }
    }
    return std::sqrt(s / b.n_y);
}

LineField spectral_derivative(const LineField& f) {
    check_alignment(f);
    const int S = f.slabs();
    CMat hat = fft_rows(f.values, false);
    for (int q = 0; q < S; ++q) hat.col(q) *= cplx(0.0, 2.0 * M_PI * centred(q, S) / f.L());
    LineField out = f;
    out.values = fft_rows(hat, true);
    return out;
}

double gelfand_derivative_check(const LineField& f) {
    const FiberBundle lhs = gelfand(spectral_derivative(f));
    const FiberBundle b = gelfand(f);
    const int rows = 3 * f.n2, ny = f.n_y, S = f.slabs();
    double err = 0.0;
    for (std::size_t i = 0; i < b.k.size(); ++i) {
        const int k = b.k[i];
        // Harmonics p with k + p N inside the box frequency range.
        std::vector<int> ps;
        for (int p = -ny; p <= ny; ++p) {
            const int q = k + p * f.N;
            if (q >= -(S / 2) && q < S - S / 2) ps.push_back(p);
        }
        CVec d = CVec::Zero(rows * ny);
        for (int p : ps) {
            CVec beta = CVec::Zero(rows);
            for (int j = 0; j < ny; ++j)
                beta += std::exp(cplx(0.0, -2.0 * M_PI * p * cell_y(j, ny))) *
                        b.fibers[i].segment(rows * j, rows);
            beta /= ny;
            const cplx mult(0.0, (b.chi[i] + 2.0 * M_PI * p) / f.eps);
            for (int j = 0; j < ny; ++j)
                d.segment(rows * j, rows) +=
                    mult * std::exp(cplx(0.0, 2.0 * M_PI * p * cell_y(j, ny))) * beta;
        }
        err = std::max(err, (d - lhs.fibers[i]).cwiseAbs().maxCoeff());
    }
    return err;
}

double floquet_check(const LineField& f) {
    const FiberBundle g = gelfand(f);
    const FiberBundle q = floquet(f);
    const int rows = 3 * f.n2;
    double err = 0.0;
    for (std::size_t i = 0; i < g.k.size(); ++i)
        for (int j = 0; j < f.n_y; ++j) {
            const cplx phase = std::exp(cplx(0.0, g.chi[i] * cell_y(j, f.n_y)));
            err = std::max(err, (q.fibers[i].segment(rows * j, rows) -
                                 phase * g.fibers[i].segment(rows * j, rows))
                                    .cwiseAbs()
                                    .maxCoeff());
        }
    return err;
}

LineField xi_smoothing_fourier(const LineField& f) {
    check_alignment(f);
    const int S = f.slabs();
    CMat hat = fft_rows(f.values, false);
    for (int q = 0; q < S; ++q) {
        const int qc = centred(q, S);
        if (qc < -(f.N / 2) || qc >= f.N - f.N / 2) hat.col(q).setZero();
    }
    LineField out = f;
    out.values = fft_rows(hat, true);
    return out;
}

LineField xi_smoothing_fiber(const LineField& f) {
    FiberBundle b = gelfand(f);
    const int rows = 3 * f.n2;
    for (auto& v : b.fibers) {
        CVec mean = CVec::Zero(rows);
        for (int j = 0; j < f.n_y; ++j) mean += v.segment(rows * j, rows);
        mean /= f.n_y;
        for (int j = 0; j < f.n_y; ++j) v.segment(rows * j, rows) = mean;
    }
    return gelfand_inverse(b);
}

namespace {

// Row vectors of the cross-section integrals of components against weights.
struct SectionWeights {
    Eigen::RowVectorXd one, x1, x2;
};

SectionWeights section_weights(const CrossSectionMesh& section, const SpMat& M2) {
    const int n2 = section.num_nodes();
    Vec ones = Vec::Ones(n2), x1(n2), x2(n2);
    for (int a = 0; a < n2; ++a) {
        x1(a) = section.nodes[a].x();
        x2(a) = section.nodes[a].y();
    }
    SectionWeights w;
    w.one = (M2 * ones).transpose();
    w.x1 = (M2 * x1).transpose();
    w.x2 = (M2 * x2).transpose();
    return w;
}

cplx integral(const Eigen::RowVectorXd& weights, const CVec& v) {
    return (weights.cast<cplx>() * v)(0);
}

CVec component(const CMat& values, int col, int c, int n2) {
    CVec v(n2);
    for (int a = 0; a < n2; ++a) v(a) = values(3 * a + c, col);
    return v;
}

// Spectral derivative of each row of a line-valued matrix.
CMat derivative_rows(const CMat& v, double L) {
    const int S = static_cast<int>(v.cols());
    CMat hat = fft_rows(v, false);
    for (int q = 0; q < S; ++q) hat.col(q) *= cplx(0.0, 2.0 * M_PI * centred(q, S) / L);
    return fft_rows(hat, true);
}

}  // namespace

LineMoments momentum_real(const LineField& f, Which which, const CrossSectionMesh& section,
                          const SpMat& M2, bool leading_only) {
    check_alignment(f);
    const SectionWeights w = section_weights(section, M2);
    const int S = f.slabs();
    CMat bend(2, S), f3x(2, S), stretch(2, S);
    for (int s = 0; s < S; ++s) {
        const CVec f1 = component(f.values, s, 0, f.n2);
        const CVec f2 = component(f.values, s, 1, f.n2);
        const CVec f3 = component(f.values, s, 2, f.n2);
        bend(0, s) = integral(w.one, f1);
        bend(1, s) = integral(w.one, f2);
        f3x(0, s) = integral(w.x1, f3);
        f3x(1, s) = integral(w.x2, f3);
        stretch(0, s) = integral(w.x2, f1) - integral(w.x1, f2);
        stretch(1, s) = integral(w.one, f3);
    }
    if (!leading_only) bend += f.eps * derivative_rows(f3x, f.L());
    LineMoments m;
    m.which = which;
    if (which == Which::Bend) m.values = bend;
    else if (which == Which::Stretch) m.values = stretch;
    else {
        m.values.resize(4, S);
        m.values.topRows(2) = bend;
        m.values.bottomRows(2) = stretch;
    }
    return m;
}

LineField momentum_adjoint(const LineMoments& m, const LineField& like,
                           const CrossSectionMesh& section, bool leading_only) {
    LineField out = make_line_field(like.N, like.n_y, like.eps, like.n2);
    const int S = like.slabs();
    CMat bend = CMat::Zero(2, S), stretch = CMat::Zero(2, S);
    if (m.which == Which::Bend) bend = m.values;
    else if (m.which == Which::Stretch) stretch = m.values;
    else {
        bend = m.values.topRows(2);
        stretch = m.values.bottomRows(2);
    }
    const CMat dbend = leading_only ? CMat::Zero(2, S) : CMat(derivative_rows(bend, like.L()));
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < like.n2; ++a) {
            const double x1 = section.nodes[a].x(), x2 = section.nodes[a].y();
            out.values(3 * a + 0, s) = bend(0, s) + x2 * stretch(0, s);
            out.values(3 * a + 1, s) = bend(1, s) - x1 * stretch(0, s);
            out.values(3 * a + 2, s) =
                stretch(1, s) - like.eps * (x1 * dbend(0, s) + x2 * dbend(1, s));
        }
    return out;
}

LineMoments moments_from_fibers(const std::vector<CVec>& fiber_moments, const FiberBundle& like,
                                Which which) {
    const int dim = static_cast<int>(fiber_moments.front().size());
    const int S = like.N * like.n_y;
    const double c = std::sqrt(like.eps / like.N);
    LineMoments m;
    m.which = which;
    m.values = CMat::Zero(dim, S);
    for (int s = 0; s < S; ++s) {
        const int n = s / like.n_y, j = s % like.n_y;
        for (std::size_t i = 0; i < like.k.size(); ++i)
            m.values.col(s) +=
                std::exp(cplx(0.0, like.chi[i] * (cell_y(j, like.n_y) + n))) * fiber_moments[i];
    }
    m.values /= c * like.N;
    return m;
}

double max_abs_diff(const LineField& a, const LineField& b) {
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

}  // namespace rodhom
