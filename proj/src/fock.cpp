#include "qptomo/fock.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "rng.hpp"

namespace qptomo {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Row-major flattening of a D x D matrix, matching the a-major bipartite
// index convention (row index = a factor).
Vec vec_rowmajor(const Mat& W) {
    const auto rows = W.rows(), cols = W.cols();
    Vec v(rows * cols);
    for (Eigen::Index a = 0; a < rows; ++a)
        for (Eigen::Index m = 0; m < cols; ++m) v(a * cols + m) = W(a, m);
    return v;
}

void require_bipartite(const FockOperator& op, const char* what) {
    if (op.modes != 2 || op.matrix.rows() != static_cast<Eigen::Index>(op.dim) * op.dim)
        throw DimensionMismatch(std::string(what) + " must be a two-mode operator");
}

// Generalized Laguerre L_n^{(a)}(x) by upward recurrence.
double laguerre(int n, int a, double x) {
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 + a - x;
    for (int j = 1; j < n; ++j) {
        const double lp1 = ((2.0 * j + 1.0 + a - x) * l - (j + a) * lm1) / (j + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

}  // namespace

Vec coherent_vector(cxd alpha, int cutoff) {
    if (cutoff < 0) throw DomainError("cutoff must be non-negative");
    const double a = std::abs(alpha);
    Vec v = Vec::Zero(cutoff + 1);
    if (a == 0.0) {
        v(0) = 1.0;
        return v;
    }
    // First omitted normalized amplitude decides adequacy.
    const double log_tail = -0.5 * a * a + (cutoff + 1) * std::log(a) -
                            0.5 * log_factorial(cutoff + 1);
    if (std::exp(log_tail) >= 1e-12)
        throw CutoffTooSmall("coherent amplitude tail exceeds 1e-12");
    const double phase = std::arg(alpha);
    for (int n = 0; n <= cutoff; ++n) {
        const double lm =
            -0.5 * a * a + n * std::log(a) - 0.5 * log_factorial(n);
        v(n) = std::exp(lm) * std::exp(iu * (phase * n));
    }
    return v;
}

Vec tmss_vector(double q, int cutoff) {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("squeezing ratio must lie in (0, 1)");
    // Norm defect of the omitted tail: sum_{k>cutoff} (1-q^2) q^{2k}.
    if (std::pow(q, 2 * (cutoff + 1)) >= 1e-12)
        throw CutoffTooSmall("squeezed-pair tail exceeds 1e-12");
    const int D = cutoff + 1;
    const double cq = std::sqrt(1.0 - q * q);
    Vec v = Vec::Zero(static_cast<Eigen::Index>(D) * D);
    for (int k = 0; k <= cutoff; ++k)
        v(static_cast<Eigen::Index>(k) * D + k) = cq * std::pow(q, k);
    return v;
}

FockOperator t_operator(double q, int cutoff) {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("squeezing ratio must lie in (0, 1)");
    const int D = cutoff + 1;
    const double cq = std::sqrt(1.0 - q * q);
    Mat m = Mat::Zero(D, D);
    for (int n = 0; n < D; ++n) m(n, n) = cq * std::pow(q, n);
    return {D, 1, OperatorKind::DiagonalMap, m};
}

FockOperator t_operator_finite(const RealVec& r) {
    const int s = static_cast<int>(r.size());
    if (s < 1) throw DimensionMismatch("weight vector is empty");
    Mat m = Mat::Zero(s, s);
    for (int n = 0; n < s; ++n) {
        if (r(n) == 0.0)
            throw ZeroWeight("probe weight vector has a zero entry");
        m(n, n) = r(n);
    }
    return {s, 1, OperatorKind::DiagonalMap, m};
}

KrausChannel identity_kraus(int cutoff) {
    return {{Mat::Identity(cutoff + 1, cutoff + 1)}};
}

KrausChannel loss_kraus(double theta, int cutoff) {
    const int D = cutoff + 1;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    KrausChannel ch;
    // K_n moves m+n -> m, losing n photons to the idle port.
    for (int n = 0; n <= cutoff; ++n) {
        Mat K = Mat::Zero(D, D);
        for (int m = 0; m + n <= cutoff; ++m) {
            const double logb = 0.5 * (log_factorial(m + n) -
                                       log_factorial(n) - log_factorial(m));
            K(m, m + n) = std::exp(logb) * std::pow(s, n) * std::pow(c, m);
        }
        ch.kraus.push_back(K);
    }
    return ch;
}

KrausChannel phase_kraus(double phi, int cutoff) {
    const int D = cutoff + 1;
    Mat K = Mat::Zero(D, D);
    for (int n = 0; n < D; ++n) K(n, n) = std::exp(iu * (phi * n));
    return {{K}};
}

KrausChannel random_cptp(int dim, int n_kraus, std::uint64_t seed) {
    if (dim < 1 || n_kraus < 1)
        throw DomainError("need at least one dimension and one Kraus term");
    detail::NormalSampler normal(seed);
    std::vector<Mat> raw;
    for (int i = 0; i < n_kraus; ++i) {
        Mat G(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) G(r, c) = cxd{normal(), normal()};
        raw.push_back(G);
    }
    Mat S = Mat::Zero(dim, dim);
    for (const Mat& G : raw) S += G.adjoint() * G;
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Mat inv_sqrt = es.eigenvectors() *
                         es.eigenvalues().cwiseSqrt().cwiseInverse()
                             .cast<cxd>().asDiagonal() *
                         es.eigenvectors().adjoint();
    KrausChannel ch;
    for (const Mat& G : raw) ch.kraus.push_back(G * inv_sqrt);
    return ch;
}

FockOperator apply_channel(const KrausChannel& ch, const FockOperator& rho) {
    if (rho.modes != 1 || rho.dim != ch.dim())
        throw DimensionMismatch("channel and state dimensions disagree");
    Mat out = Mat::Zero(rho.dim, rho.dim);
    for (const Mat& K : ch.kraus) out += K * rho.matrix * K.adjoint();
    return {rho.dim, 1, OperatorKind::Density, out};
}

FockOperator one_sided_apply(const KrausChannel& ch,
                             const FockOperator& rho_ab) {
    require_bipartite(rho_ab, "input state");
    const int D = ch.dim();
    if (rho_ab.dim != D)
        throw DimensionMismatch("channel and state dimensions disagree");
    Mat out = Mat::Zero(rho_ab.matrix.rows(), rho_ab.matrix.cols());
    for (int a = 0; a < D; ++a)
        for (int ap = 0; ap < D; ++ap) {
            const Mat block = rho_ab.matrix.block(a * D, ap * D, D, D);
            Mat acc = Mat::Zero(D, D);
            for (const Mat& K : ch.kraus) acc += K * block * K.adjoint();
            out.block(a * D, ap * D, D, D) = acc;
        }
    return {D, 2, OperatorKind::Density, out};
}

FockOperator one_sided_apply(const KrausChannel& ch, const Vec& psi_ab) {
    const int D = ch.dim();
    if (psi_ab.size() != static_cast<Eigen::Index>(D) * D)
        throw DimensionMismatch("channel and state dimensions disagree");
    Mat psi(D, D);  // psi(a, b), a-major flattening undone
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) psi(a, b) = psi_ab(a * D + b);
    Mat out = Mat::Zero(static_cast<Eigen::Index>(D) * D,
                        static_cast<Eigen::Index>(D) * D);
    for (const Mat& K : ch.kraus) {
        const Vec w = vec_rowmajor(psi * K.transpose());
        out += w * w.adjoint();
    }
    return {D, 2, OperatorKind::Density, out};
}

FockOperator choi_from_channel(const KrausChannel& ch, int cutoff) {
    const int D = cutoff + 1;
    if (ch.dim() != D)
        throw DimensionMismatch("channel dimension disagrees with cutoff");
    // (I (x) channel) on the unnormalized sum_k |kk>, i.e. psi = identity.
    Mat out = Mat::Zero(static_cast<Eigen::Index>(D) * D,
                        static_cast<Eigen::Index>(D) * D);
    for (const Mat& K : ch.kraus) {
        const Vec w = vec_rowmajor(K.transpose());
        out += w * w.adjoint();
    }
    return {D, 2, OperatorKind::Density, out};
}

FockOperator tmss_reconstruct(const FockOperator& omega_q, double q,
                              double tol) {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("squeezing ratio must lie in (0, 1)");
    require_bipartite(omega_q, "probe output");
    const int D = omega_q.dim;
    const int cutoff = D - 1;
    const double cq = std::sqrt(1.0 - q * q);
    // Truncation noise sits at the double-precision floor and gets blown up
    // by the largest inverse weight; refuse when the result can't meet tol.
    const double amplified_floor = 1e-16 / (cq * std::pow(q, cutoff));
    if (amplified_floor > tol)
        throw AmplificationOverflow(
            "inverse squeezing weights amplify truncation noise beyond "
            "tolerance");
    Vec s(static_cast<Eigen::Index>(D) * D);
    for (int a = 0; a < D; ++a) {
        const double w = 1.0 / (cq * std::pow(q, a));
        for (int b = 0; b < D; ++b) s(static_cast<Eigen::Index>(a) * D + b) = w;
    }
    Mat out = s.asDiagonal() * omega_q.matrix * s.asDiagonal();
    return {D, 2, OperatorKind::Density, out};
}

FockOperator qudit_reconstruct(const FockOperator& omega_r,
                               const RealVec& r) {
    require_bipartite(omega_r, "probe output");
    const int s = static_cast<int>(r.size());
    if (omega_r.dim != s)
        throw DimensionMismatch("weight vector length disagrees with state");
    Vec w(static_cast<Eigen::Index>(s) * s);
    for (int a = 0; a < s; ++a) {
        if (r(a) == 0.0)
            throw ZeroWeight("probe weight vector has a zero entry");
        for (int b = 0; b < s; ++b)
            w(static_cast<Eigen::Index>(a) * s + b) = 1.0 / r(a);
    }
    Mat out = w.asDiagonal() * omega_r.matrix * w.asDiagonal();
    return {s, 2, OperatorKind::Density, out};
}

FockOperator qudit_predict(const FockOperator& omega_r, const RealVec& r,
                           const Vec& c) {
    require_bipartite(omega_r, "probe output");
    const int s = static_cast<int>(r.size());
    if (omega_r.dim != s || c.size() != s)
        throw DimensionMismatch("weight/input lengths disagree with state");
    if (std::abs(c.squaredNorm() - 1.0) > 1e-8)
        throw DomainError("input coefficients must have unit norm");
    Vec chi(s);
    for (int p = 0; p < s; ++p) {
        if (r(p) == 0.0)
            throw ZeroWeight("probe weight vector has a zero entry");
        chi(p) = std::conj(c(p)) / r(p);
    }
    Mat out = Mat::Zero(s, s);
    for (int p = 0; p < s; ++p)
        for (int n = 0; n < s; ++n)
            out += std::conj(chi(p)) * chi(n) *
                   omega_r.matrix.block(p * s, n * s, s, s);
    return {s, 1, OperatorKind::Density, out};
}

FockOperator predict_from_choi(const FockOperator& choi, const Vec& input) {
    require_bipartite(choi, "two-sided channel state");
    const int D = choi.dim;
    if (input.size() != D)
        throw DimensionMismatch("input vector length disagrees with state");
    // <psi*| Omega |psi*> over the a factor; conjugating twice leaves the
    // raw input coefficients on the left.
    Mat out = Mat::Zero(D, D);
    for (int p = 0; p < D; ++p)
        for (int n = 0; n < D; ++n) {
            const cxd w = input(p) * std::conj(input(n));
            if (w != 0.0) out += w * choi.matrix.block(p * D, n * D, D, D);
        }
    return {D, 1, OperatorKind::Density, out};
}

double q_eval(const FockOperator& rho, const Vec& Z) {
    if (Z.size() != rho.modes)
        throw DimensionMismatch("one amplitude per mode required");
    Vec full = coherent_vector(Z(0), rho.dim - 1);
    for (int m = 1; m < rho.modes; ++m) {
        const Vec next = coherent_vector(Z(m), rho.dim - 1);
        Vec combined(full.size() * next.size());
        for (Eigen::Index i = 0; i < full.size(); ++i)
            combined.segment(i * next.size(), next.size()) = full(i) * next;
        full = combined;
    }
    return (full.adjoint() * rho.matrix * full).value().real();
}

FockOperator density_from_vector(const Vec& psi, int modes) {
    const auto n = psi.size();
    int dim = static_cast<int>(n);
    if (modes == 0) {
        const auto root =
            static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
        modes = (root >= 2 && root * root == n) ? 2 : 1;
    }
    if (modes == 2) {
        const auto root =
            static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
        if (root * root != n)
            throw DimensionMismatch("two-mode vector length must be square");
        dim = static_cast<int>(root);
    }
    return {dim, modes, OperatorKind::Density, psi * psi.adjoint()};
}

FockOperator thermal_state(double nbar, int cutoff) {
    if (nbar < 0.0) throw DomainError("mean photon number must be >= 0");
    const int D = cutoff + 1;
    Mat m = Mat::Zero(D, D);
    if (nbar == 0.0) {
        m(0, 0) = 1.0;
    } else {
        for (int n = 0; n < D; ++n)
            m(n, n) = std::exp(n * std::log(nbar) -
                               (n + 1) * std::log(nbar + 1.0));
    }
    return {D, 1, OperatorKind::Density, m};
}

Mat displacement_operator(cxd alpha, int cutoff) {
    const int D = cutoff + 1;
    const double x = std::norm(alpha);
    Mat op(D, D);
    for (int m = 0; m < D; ++m)
        for (int n = 0; n < D; ++n) {
            const int lo = std::min(m, n);
            const int diff = std::abs(m - n);
            const double mag =
                std::exp(0.5 * (log_factorial(lo) -
                                log_factorial(std::max(m, n))) -
                         0.5 * x);
            const cxd base = m >= n ? std::pow(alpha, diff)
                                    : std::pow(-std::conj(alpha), diff);
            op(m, n) = mag * base * laguerre(lo, diff, x);
        }
    return op;
}

Vec squeezed_coherent_vector(double r, cxd Z, int cutoff) {
    if (cutoff < 2) throw DomainError("cutoff too small for tail check");
    const int D = cutoff + 1;
    const double ch = std::cosh(r), sh = std::sinh(r);
    Vec psi(D);
    psi(0) = 1.0;
    psi(1) = Z / ch;
    for (int n = 1; n < cutoff; ++n)
        psi(n + 1) = (Z * psi(n) - sh * std::sqrt(double(n)) * psi(n - 1)) /
                     (ch * std::sqrt(double(n + 1)));
    const double norm = psi.norm();
    if (std::abs(psi(cutoff)) > 1e-12 * norm ||
        std::abs(psi(cutoff - 1)) > 1e-12 * norm)
        throw CutoffTooSmall("squeezed-state tail has not decayed");
    return psi / norm;
}

double kraus_completeness_defect(const KrausChannel& ch, int margin) {
    const int D = ch.dim();
    const int interior = D - margin;
    if (interior < 1) throw DomainError("margin leaves no interior block");
    Mat M = Mat::Zero(D, D);
    for (const Mat& K : ch.kraus) M += K.adjoint() * K;
    M -= Mat::Identity(D, D);
    return M.topLeftCorner(interior, interior).cwiseAbs().maxCoeff();
}

}  // namespace qptomo
