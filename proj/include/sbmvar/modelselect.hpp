#pragma once

// Choice of the number of communities by an integrated classification
// likelihood adapted to partially observed graphs.

#include <string>
#include <vector>

#include "sbmvar/varem.hpp"

namespace sbmvar {

/// L_X(A; z, Q) + sum_i log alpha_{z_i} - (k - 1)/2 log n - k(k + 1)/4 log(#observed pairs),
/// with z the hard labels of the fit and Q their empirical block means.
double icl_score(const AdjacencyMatrix& a, const SamplingMask& x, const FitResult& fit);

struct KScore {
  int k;
  double score;
  bool converged;
};

struct SelectionResult {
  int k_hat = 0;
  std::vector<KScore> scores;       // in k_range order, skipped k omitted
  std::vector<FitResult> fits;      // parallel to scores
  std::vector<std::string> warnings;

  const FitResult& best_fit() const;
};

/// Fits every k in k_range with the same config and keeps the highest score
/// (smallest k on ties). A k whose restarts all fail is skipped with a warning.
SelectionResult select_k(const AdjacencyMatrix& a, const SamplingMask& x,
                         const std::vector<int>& k_range, const EmConfig& cfg);

}  // namespace sbmvar
