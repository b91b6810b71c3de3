#pragma once

#include <cstdint>
#include <vector>

#include "qptomo/channel.hpp"
#include "qptomo/types.hpp"

namespace qptomo {

// Design matrix of the linear-coefficient system: row i is
// [1, conj(alpha_i) (k entries), alpha_i (k entries)], shape N x (2k+1).
// The same matrix serves all k output modes as a multi-rhs solve.
Mat build_K(const std::vector<Vec>& alphas);

// Design matrix of the constant-term system: row i is
// [1, conj(alpha_i), alpha_i, half the symmetric conjugate pair products
// (m <= n), half the symmetric plain products (m <= n), all mixed products
// alpha_m conj(alpha_n)], shape N x (k+1)(2k+1).
Mat build_J(const std::vector<Vec>& alphas);

struct ReconstructOptions {
    double quadratic_tol = 1e-6;   // max allowed spread of X_bb/Y_bb across records
    double conjugate_tol = 1e-6;   // max allowed defect of the recovered conjugate pairs
    double cond_limit = 1e8;       // condition-number ceiling for K and J
    double det_tol = 1e-8;         // volume floor, relative to column-norm scale
};

struct ChoiReconstruction {
    GaussianQForm choi;
    double residual_K = 0.0;
    double residual_J = 0.0;
    double cond_K = 0.0;
    double cond_J = 0.0;
    // Largest deviation of any record's quadratic blocks from the pooled mean.
    double quadratic_consistency = 0.0;
    // Defect of the independently solved conjugate copies (Gaussianity check).
    double conjugate_deviation = 0.0;
    bool tp_assumed = false;
};

// Recover the two-sided channel form from coherent-probe records.
//
// The quadratic blocks X_bb, Y_bb are probe-independent and are averaged
// after a consistency check.  The linear coefficients d determine
// (Gamma_b, X_ab, Y_ab) through the K system; the constants c determine
// (c0, Gamma_a, X_aa, Y_aa) through the J system, in which the conjugate
// copies of Gamma_a and X_aa enter as independent unknowns whose agreement
// with the actual conjugates is verified, not imposed.
//
// With trace_preserving set, the constants c are not used: only the b-side
// and cross blocks are recovered, a-side blocks are left zero ("not
// identified"), and c0 is fixed so the vacuum-probe output has unit trace.
ChoiReconstruction reconstruct(const std::vector<ProbeRecord>& records,
                               bool trace_preserving = false,
                               const ReconstructOptions& opts = {});

// Explicit solution of the same systems for the canonical six-probe set
// {0, 1, i, -1, -i, 1+i} at k=1, in exactly that order (WrongProbeSet
// otherwise).  Agrees with reconstruct() to solver roundoff.
ChoiReconstruction closed_form_default(const std::vector<ProbeRecord>& records);

// Canonical probe sets: k=1 is the six-point set above; k=2 is a fifteen-
// point set chosen for well-conditioned K and J.
std::vector<Vec> default_probe_set(int k = 1);

// Figures of merit for one candidate probe set.  abs_det generalizes |det|
// to overdetermined sets as the product of singular values; scale is the
// product of column norms (the Hadamard bound), so abs_det/scale is a
// dimensionless degeneracy measure.
struct ProbeSetReport {
    int index = 0;  // position in the candidate list
    double abs_det_K = 0.0;
    double abs_det_J = 0.0;
    double cond_K = 0.0;
    double cond_J = 0.0;
    bool admissible = false;
};

// Rank candidate sets by max(cond_K, cond_J) ascending.  A set is
// admissible when both volumes clear det_tol times their column-norm scale.
// Degenerate sets are reported, never rejected.
std::vector<ProbeSetReport> probe_design(
    const std::vector<std::vector<Vec>>& candidates, double det_tol = 1e-8);

// Perturb each record's d (real and imaginary parts, every entry) and c by
// independent Gaussian noise of standard deviation sigma.  Deterministic
// for a fixed seed; the quadratic blocks are left untouched.
std::vector<ProbeRecord> add_noise(const std::vector<ProbeRecord>& records,
                                   double sigma, std::uint64_t seed);

}  // namespace qptomo
