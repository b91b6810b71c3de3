#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qptomo {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

inline constexpr cxd iu{0.0, 1.0};

}  // namespace qptomo
