#pragma once

// Shared helpers for the test binaries: seeded random objects, distance
// measures, and grid sampling.  Everything is header-only and deterministic
// for a fixed seed.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qptomo/channel.hpp"
#include "qptomo/qform.hpp"
#include "qptomo/types.hpp"

namespace qptest {

using namespace qptomo;

inline double randn(std::mt19937_64& g) {
    std::normal_distribution<double> d;
    return d(g);
}

inline RealMat randn_real(int rows, int cols, double scale,
                          std::mt19937_64& g) {
    RealMat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = scale * randn(g);
    return m;
}

inline Vec randn_complex_vec(int n, double scale, std::mt19937_64& g) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * cxd{randn(g), randn(g)};
    return v;
}

inline Vec single(cxd z) { return Vec::Constant(1, z); }

// Random integrable two-sided form over k+k modes.  The real-coordinate
// quadratic form is forced negative definite (eigenvalues <= -1/4) by
// construction, then mapped back to the complex (X, Y) pair; X stays
// symmetric and Y Hermitian by taking the right symmetry parts.
inline GaussianQForm random_valid_choi(int k, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    const int n = 2 * k;
    const RealMat G = randn_real(2 * n, 2 * n, 0.35, g);
    const RealMat H = -(G * G.transpose() + 0.25 * RealMat::Identity(2 * n, 2 * n));
    const RealMat P = H.topLeftCorner(n, n);
    const RealMat Q = H.topRightCorner(n, n);
    const RealMat R = H.bottomRightCorner(n, n);
    const RealMat reX = 0.5 * (P - R);
    const RealMat reY = 0.5 * (P + R);
    const RealMat imX = -0.5 * (Q + Q.transpose());
    const RealMat imY = -0.5 * (Q - Q.transpose());
    const Mat X = reX.cast<cxd>() + iu * imX.cast<cxd>();
    const Mat Y = reY.cast<cxd>() + iu * imY.cast<cxd>();
    const Vec gamma = randn_complex_vec(n, 0.3, g);
    const double c0 = 0.2 * randn(g);
    return GaussianQForm(c0, gamma, X, Y, ChoiPartition{k, k});
}

// Largest entrywise deviation across the constant, linear, and both
// quadratic coefficient blocks.
inline double block_distance(const GaussianQForm& A, const GaussianQForm& B) {
    double d = std::abs(A.c0() - B.c0());
    d = std::max(d, (A.gamma() - B.gamma()).cwiseAbs().maxCoeff());
    d = std::max(d, (A.X() - B.X()).cwiseAbs().maxCoeff());
    d = std::max(d, (A.Y() - B.Y()).cwiseAbs().maxCoeff());
    return d;
}

inline std::vector<ProbeRecord> simulate_set(const GaussianQForm& choi,
                                             const std::vector<Vec>& alphas) {
    std::vector<ProbeRecord> records;
    records.reserve(alphas.size());
    for (const Vec& a : alphas)
        records.push_back(simulate_probe(choi, a).record);
    return records;
}

// res x res points of [cx - hw, cx + hw] x [cy - hw, cy + hw].
inline std::vector<cxd> grid_points(cxd center, double hw, int res) {
    std::vector<cxd> pts;
    pts.reserve(static_cast<std::size_t>(res) * res);
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            const double re = center.real() - hw + 2.0 * hw * i / (res - 1);
            const double im = center.imag() - hw + 2.0 * hw * j / (res - 1);
            pts.emplace_back(re, im);
        }
    return pts;
}

// Half the trace norm of the (Hermitized) difference of two matrices.
inline double trace_distance(const Mat& A, const Mat& B) {
    const Mat delta = 0.5 * ((A - B) + (A - B).adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(delta);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// <psi| rho |psi> for a normalized pure reference state.
inline double pure_fidelity(const Vec& psi, const Mat& rho) {
    return (psi.adjoint() * rho * psi).value().real();
}

}  // namespace qptest
