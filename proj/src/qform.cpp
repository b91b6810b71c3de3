#include "qptomo/qform.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qptomo {

namespace {

// H such that the exponent's quadratic part equals v^T H v over
// v = (Re Z, Im Z).  With X = Xr + i Xi (symmetric) and Y = Yr + i Yi
// (Hermitian), expanding Re(Z^T X Z) + Z^dag Y Z gives the four real blocks
// below; Yi drops out of the diagonal blocks because it is antisymmetric.
RealMat real_quadratic_blocks(const Mat& X, const Mat& Y) {
    const auto n = X.rows();
    const RealMat A = X.real() + Y.real();
    const RealMat B = -(X.imag() + Y.imag());
    const RealMat C = Y.real() - X.real();
    RealMat H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = A;
    H.topRightCorner(n, n) = B;
    H.bottomLeftCorner(n, n) = B.transpose();
    H.bottomRightCorner(n, n) = C;
    // Symmetrize away the roundoff from forming the blocks separately.
    return 0.5 * (H + H.transpose());
}

}  // namespace

GaussianQForm::GaussianQForm(double c0, Vec gamma, Mat X, Mat Y,
                             std::optional<ChoiPartition> partition)
    : c0_(c0), gamma_(std::move(gamma)), X_(std::move(X)), Y_(std::move(Y)),
      partition_(std::move(partition)) {
    const auto n = gamma_.size();
    if (X_.rows() != n || X_.cols() != n || Y_.rows() != n || Y_.cols() != n)
        throw DimensionMismatch("quadratic blocks must be n_modes square");
    if (partition_ && partition_->a_modes + partition_->b_modes != n)
        throw DimensionMismatch("partition does not cover all modes");

    const double scale = std::max({1.0, X_.cwiseAbs().maxCoeff(),
                                   Y_.cwiseAbs().maxCoeff()});
    if ((X_ - X_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidForm("X block is not symmetric");
    if ((Y_ - Y_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidForm("Y block is not Hermitian");
    X_ = 0.5 * (X_ + X_.transpose()).eval();
    Y_ = 0.5 * (Y_ + Y_.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<RealMat> eig(real_quadratic_blocks(X_, Y_),
                                               Eigen::EigenvaluesOnly);
    top_eig_ = eig.eigenvalues().maxCoeff();
    valid_ = top_eig_ < -1e-12;
}

cxd exponent_at(const GaussianQForm& form, const Vec& Z) {
    if (Z.size() != form.gamma().size())
        throw DimensionMismatch("evaluation point has wrong mode count");
    const cxd lin = form.gamma().cwiseProduct(Z).sum();
    const cxd quad = 0.5 * (Z.transpose() * form.X() * Z).value();
    const cxd herm = (Z.adjoint() * form.Y() * Z).value();
    return form.c0() + lin + std::conj(lin) + quad + std::conj(quad) + herm;
}

double evaluate_q(const GaussianQForm& form, const Vec& Z) {
    const cxd e = exponent_at(form, Z);
    if (std::abs(e.imag()) > 1e-9)
        throw NonRealExponent("exponent has a non-real value");
    return std::exp(e.real());
}

RealMat real_quadratic_form(const GaussianQForm& form) {
    return real_quadratic_blocks(form.X(), form.Y());
}

RealVec real_linear_coeff(const GaussianQForm& form) {
    const auto n = form.gamma().size();
    RealVec b(2 * n);
    b.head(n) = 2.0 * form.gamma().real();
    b.tail(n) = -2.0 * form.gamma().imag();
    return b;
}

double log_gaussian_integral(const GaussianQForm& form) {
    if (!form.is_valid())
        throw NotIntegrable("quadratic form is not negative definite");
    const RealMat negH = -real_quadratic_form(form);
    const RealVec b = real_linear_coeff(form);
    Eigen::LLT<RealMat> llt(negH);
    if (llt.info() != Eigen::Success)
        throw NotIntegrable("quadratic form is numerically indefinite");
    const RealVec x = llt.solve(b);
    // Each mode contributes a factor pi that cancels the 1/pi^n measure.
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal()
                                     .array().log().sum();
    return form.c0() + 0.25 * b.dot(x) - 0.5 * log_det;
}

double gaussian_integral(const GaussianQForm& form) {
    return std::exp(log_gaussian_integral(form));
}

GaussianQForm normalize(const GaussianQForm& form) {
    const double li = log_gaussian_integral(form);
    if (!std::isfinite(li))
        throw ZeroWeight("form has no finite weight to normalize");
    return form.with_c0(form.c0() - li);
}

}  // namespace qptomo
