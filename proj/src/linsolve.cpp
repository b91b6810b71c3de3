#include "qptomo/linsolve.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include "qptomo/errors.hpp"

namespace qptomo {

double condition_number(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

LinearSolution solve_linear(const Mat& A, const Mat& rhs, double cond_limit) {
    if (A.rows() < A.cols())
        throw DimensionMismatch("system is underdetermined");
    if (A.rows() != rhs.rows())
        throw DimensionMismatch("rhs row count does not match");

    LinearSolution out;
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    out.cond = smin > 0.0 ? smax / smin
                          : std::numeric_limits<double>::infinity();

    if (A.rows() == A.cols()) {
        Eigen::PartialPivLU<Mat> lu(A);
        const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (pivot_min < 1e-12 * std::max(1e-300, A.cwiseAbs().maxCoeff()))
            throw SingularSystem("square system has a negligible pivot");
        out.x = lu.solve(rhs);
    } else {
        out.x = svd.solve(rhs);
    }
    out.ill_conditioned = out.cond > cond_limit;

    const Mat res = A * out.x - rhs;
    out.residuals = res.colwise().norm().transpose();
    return out;
}

}  // namespace qptomo
