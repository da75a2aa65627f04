#pragma once

// Soft-impute style low-rank completion of the adjacency matrix.

#include <vector>

#include "sbmvar/netcore.hpp"

namespace sbmvar {

struct SvtConfig {
  int rank = 1;
  double lambda = 0.0;
  int max_iter = 200;
  double tol = 1e-6;  // on ||M_new - M||_F / ||M||_F

  void validate() const;
};

struct SoftImputeResult {
  ThetaMatrix theta;
  /// 0.5 * ||P_obs(A - M)||_F^2 + lambda * ||M||_* for the initial fill and each iterate.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Repeatedly fills the unobserved entries (and the diagonal) with the current
/// estimate, soft-thresholds the singular values by lambda and keeps the top
/// `rank`. The working matrix is symmetric, so its SVD is read off a symmetric
/// eigendecomposition (singular values |lambda_i|). Output is symmetrised,
/// clipped to [0, 1] and has a zero diagonal.
SoftImputeResult soft_impute_detailed(const AdjacencyMatrix& a, const SamplingMask& x,
                                      const SvtConfig& cfg);
ThetaMatrix soft_impute(const AdjacencyMatrix& a, const SamplingMask& x, const SvtConfig& cfg);

}  // namespace sbmvar
