#pragma once

#include <cstdint>
#include <vector>

#include "qptomo/errors.hpp"
#include "qptomo/types.hpp"

namespace qptomo {

// Truncated photon-number-basis workhorse used to verify the analytic
// Gaussian paths.  All bipartite objects use a-major index order:
// basis state |n_a, n_b> sits at flat index n_a * dim + n_b.

enum class OperatorKind { Density, Kraus, DiagonalMap };

struct FockOperator {
    int dim = 0;    // per-mode dimension, cutoff + 1
    int modes = 1;  // tensor factors; matrix is (dim^modes) square
    OperatorKind kind = OperatorKind::Density;
    Mat matrix;
};

// A channel as an explicit Kraus list on one truncated mode.
struct KrausChannel {
    std::vector<Mat> kraus;
    int dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().rows()); }
};

// |alpha> truncated at cutoff, components e^{-|a|^2/2} a^n / sqrt(n!)
// (log-space evaluation).  Throws CutoffTooSmall unless the first omitted
// normalized amplitude is below 1e-12.
Vec coherent_vector(cxd alpha, int cutoff);

// Two-mode squeezed vacuum sqrt(1-q^2) sum_k q^k |kk>, 0 < q < 1.  Throws
// CutoffTooSmall when the omitted tail's norm contribution exceeds 1e-12.
Vec tmss_vector(double q, int cutoff);

// Diagonal weight operators whose inverse undoes an entangled probe:
// diag(sqrt(1-q^2) q^n) and, for the finite-dimensional path, diag(r_k).
FockOperator t_operator(double q, int cutoff);
FockOperator t_operator_finite(const RealVec& r);

// Built-in single-mode channels.
KrausChannel identity_kraus(int cutoff);
// Pure loss with transmitted amplitude cos(theta): Kraus n-photon-loss
// ladder of a beam splitter against vacuum.
KrausChannel loss_kraus(double theta, int cutoff);
KrausChannel phase_kraus(double phi, int cutoff);
// Seeded random CPTP channel: random complex Kraus candidates completed
// to exactly trace preserving via S^{-1/2}, S = sum K^dag K.
KrausChannel random_cptp(int dim, int n_kraus, std::uint64_t seed);

// sum_i K rho K^dag on a single mode.
FockOperator apply_channel(const KrausChannel& ch, const FockOperator& rho);

// (I (x) channel) on a bipartite state, the channel acting on the b factor.
// The pure-state overload avoids forming the dim^2-square density matrix
// until after the Kraus contraction.
FockOperator one_sided_apply(const KrausChannel& ch, const FockOperator& rho_ab);
FockOperator one_sided_apply(const KrausChannel& ch, const Vec& psi_ab);

// Two-sided channel state (I (x) channel)(|Phi><Phi|) with the UNNORMALIZED
// maximally entangled |Phi> = sum_k |kk> truncated at cutoff, so a trace-
// preserving channel gives trace cutoff+1.
FockOperator choi_from_channel(const KrausChannel& ch, int cutoff);

// Undo a two-mode-squeezed probe: (T^{-1} (x) I) Omega (T^{-1} (x) I).
// The q^{-n} weights amplify truncation noise; the call throws
// AmplificationOverflow when the floor estimate 1e-16 / (c_q q^cutoff)
// exceeds tol, i.e. when the result cannot be trusted to tol.
FockOperator tmss_reconstruct(const FockOperator& omega_q, double q,
                              double tol = 1e-6);

// Finite-dimensional (s-level) analogues, exact at any s: probe state
// sum_k r_k |kk> with all r_k nonzero (ZeroWeight otherwise).
FockOperator qudit_reconstruct(const FockOperator& omega_r, const RealVec& r);
// Output for input sum_k c_k |k> (unit norm): contract the probe-side
// factor with conj(c_k)/r_k.
FockOperator qudit_predict(const FockOperator& omega_r, const RealVec& r,
                           const Vec& c);

// Output state for a pure input pushed through a two-sided channel state:
// rho_out[j,l] = sum_{p,n} psi_p Choi[(p,j),(n,l)] conj(psi_n).
FockOperator predict_from_choi(const FockOperator& choi, const Vec& input);

// <Z|rho|Z> with one coherent amplitude per mode (a-major tensor order).
double q_eval(const FockOperator& rho, const Vec& Z);

// Supporting constructions used by the verification fixtures.
// modes = 0 infers: perfect-square length means an a-major two-mode vector.
FockOperator density_from_vector(const Vec& psi, int modes = 0);
// Geometric photon-number mixture of mean nbar (trace deficit = cutoff tail,
// deliberately not renormalized).
FockOperator thermal_state(double nbar, int cutoff);
// D(alpha) via the associated-Laguerre matrix elements, log-space factorials.
Mat displacement_operator(cxd alpha, int cutoff);
// S(r) D(Z) |0>: squeezed displaced vacuum by three-term recurrence,
// normalized; throws CutoffTooSmall if the tail has not decayed to 1e-12.
Vec squeezed_coherent_vector(double r, cxd Z, int cutoff);

// Max norm of (sum K^dag K - I) over the interior block, rows/cols below
// dim - margin; truncation pushes completeness defects into the last rows.
double kraus_completeness_defect(const KrausChannel& ch, int margin);

}  // namespace qptomo
