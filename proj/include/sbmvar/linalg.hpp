#pragma once

// Partial symmetric eigendecomposition backed by LAPACK.

#include <Eigen/Dense>

namespace sbmvar {

struct Eigenpairs {
  Eigen::VectorXd values;   // sorted by |value|, descending
  Eigen::MatrixXd vectors;  // n x r, orthonormal columns
};

/// The r eigenpairs of the symmetric matrix `m` with the largest |eigenvalue|.
/// The matrix is tridiagonalised once; only the 2r candidates at the two ends
/// of the spectrum are computed and back-transformed. Throws kNumerical on a
/// LAPACK failure.
Eigenpairs top_abs_eigenpairs(const Eigen::MatrixXd& m, int r);

}  // namespace sbmvar
