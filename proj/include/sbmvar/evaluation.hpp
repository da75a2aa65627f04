#pragma once

// Error metrics and link-prediction evaluation.

#include <cstdint>
#include <vector>

#include "sbmvar/netcore.hpp"

namespace sbmvar {

/// Largest k for which misclassified() enumerates permutations.
inline constexpr int kMaxPermutationK = 10;

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

struct PrCurve {
  std::vector<PrPoint> points;  // thresholds strictly decreasing
  std::int64_t positives = 0;
};

/// sum_{i != j} (theta_hat_ij - theta_star_ij)^2.
double frobenius_error(const ThetaMatrix& theta_hat, const ThetaMatrix& theta_star);

/// frobenius_error / rho^2.
double normalized_sparse_error(const ThetaMatrix& theta_hat, const ThetaMatrix& theta_star,
                               double rho);

/// min over permutations sigma of sum_i 1{z_star(i) != sigma(z_hat(i))}.
std::int64_t misclassified(const LabelAssignment& z_hat, const LabelAssignment& z_star);

/// Thresholds are the distinct scores on eval_mask pairs (i<j), descending;
/// predictions are score >= threshold.
PrCurve precision_recall(const ThetaMatrix& theta_hat, const AdjacencyMatrix& a_test,
                         const SamplingMask& eval_mask);

/// Step-wise area under the curve (sum of precision * recall increments),
/// i.e. average precision.
double average_precision(const PrCurve& curve);

/// ||(1 - X) .* (A - theta_hat)||^2 / ||(1 - X) .* A||^2 over off-diagonal pairs.
double heldout_error(const ThetaMatrix& theta_hat, const AdjacencyMatrix& a,
                     const SamplingMask& x_train);

}  // namespace sbmvar
