#pragma once

#include <optional>

#include "qptomo/errors.hpp"
#include "qptomo/types.hpp"

namespace qptomo {

// Split of the modes of a two-sided (Choi-style) form into the retained
// reference block (a, first `a_modes` indices) and the channel-output block
// (b, the remaining `b_modes` indices).
struct ChoiPartition {
    int a_modes = 0;
    int b_modes = 0;
};

// Exponential-of-quadratic ansatz for a Husimi function over n modes,
//
//   Q(Z) = exp( c0 + G.Z + conj(G.Z) + Z^T X Z / 2 + conj(Z^T X Z / 2)
//               + Z^dag Y Z ),
//
// with X complex symmetric and Y Hermitian, so the exponent is real for
// every Z.  No 1/pi^n prefactor is folded in: Q is the bare coherent-state
// expectation value, and all measure factors live in gaussian_integral().
//
// Construction symmetrizes X and Hermitizes Y after checking that the input
// deviates by at most a 1e-12 relative margin; larger asymmetry is rejected
// as InvalidForm.  Whether the form is integrable (quadratic exponent
// negative definite over real coordinates) is recorded as a queryable flag,
// not enforced: two-sided channel forms of deterministic maps are legitimate
// non-integrable objects.
class GaussianQForm {
public:
    GaussianQForm(double c0, Vec gamma, Mat X, Mat Y,
                  std::optional<ChoiPartition> partition = std::nullopt);

    int n_modes() const { return static_cast<int>(gamma_.size()); }
    double c0() const { return c0_; }
    const Vec& gamma() const { return gamma_; }
    const Mat& X() const { return X_; }
    const Mat& Y() const { return Y_; }
    const std::optional<ChoiPartition>& partition() const { return partition_; }

    // True iff every eigenvalue of the real-coordinate quadratic form lies
    // below -1e-12, i.e. the Gaussian decays in all phase-space directions.
    bool is_valid() const { return valid_; }
    // Largest eigenvalue of the real-coordinate quadratic form (diagnostic).
    double quadratic_top_eigenvalue() const { return top_eig_; }

    GaussianQForm with_c0(double c0) const {
        GaussianQForm f = *this;
        f.c0_ = c0;
        return f;
    }

private:
    double c0_;
    Vec gamma_;
    Mat X_;
    Mat Y_;
    std::optional<ChoiPartition> partition_;
    bool valid_;
    double top_eig_;
};

// Exponent of the form at Z as a complex number (imaginary part is roundoff
// for a well-formed input).
cxd exponent_at(const GaussianQForm& form, const Vec& Z);

// Q(Z).  Throws NonRealExponent if the exponent's imaginary part exceeds
// 1e-9, which can only happen if the stored matrices were corrupted.
double evaluate_q(const GaussianQForm& form, const Vec& Z);

// The 2n x 2n real symmetric matrix H and vector b such that the exponent
// equals c0 + b.v + v^T H v in stacked coordinates v = (Re Z, Im Z).
RealMat real_quadratic_form(const GaussianQForm& form);
RealVec real_linear_coeff(const GaussianQForm& form);

// (1/pi^n) Integral of Q over all of phase space, evaluated in closed form.
// Equals the trace of the represented operator.  Throws NotIntegrable for
// forms whose quadratic part is not negative definite.
double gaussian_integral(const GaussianQForm& form);

// log of gaussian_integral, safe against under/overflow of the exponential.
double log_gaussian_integral(const GaussianQForm& form);

// Same form with c0 shifted so that gaussian_integral == 1.
GaussianQForm normalize(const GaussianQForm& form);

}  // namespace qptomo
