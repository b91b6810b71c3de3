#pragma once

#include "qptomo/types.hpp"

namespace qptomo {

// Result of a dense solve: solution columns, per-column residual norms of
// A x - rhs, the 2-norm condition number of A, and a warning flag set when
// that condition number exceeds the requested limit.
struct LinearSolution {
    Mat x;
    RealVec residuals;
    double cond = 0.0;
    bool ill_conditioned = false;
};

// Solve A x = rhs for square or overdetermined A.
//
// Square systems go through partial-pivot LU; a pivot smaller than
// 1e-12 * max|A_ij| throws SingularSystem.  Tall systems are solved in the
// least-squares sense by SVD.  Either way the condition number is computed
// from the singular values; cond > cond_limit only sets the warning flag,
// callers decide whether that is fatal.
LinearSolution solve_linear(const Mat& A, const Mat& rhs,
                            double cond_limit = 1e8);

// Condition number (ratio of extreme singular values) without solving.
double condition_number(const Mat& A);

}  // namespace qptomo
