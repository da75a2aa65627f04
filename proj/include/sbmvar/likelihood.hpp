#pragma once

// Exact conditional likelihood of (z, Q) given the observed entries of A.

#include <cstdint>
#include <optional>
#include <utility>

#include "sbmvar/netcore.hpp"

namespace sbmvar {

/// Probability floor/ceiling used whenever a connectivity estimate feeds a logarithm.
inline constexpr double kProbClamp = 1e-9;
/// Largest k^n accepted by the enumeration routines.
inline constexpr double kMaxEnumeration = 1e7;

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Per block pair (a <= b, mirrored): observed edges, observed pairs, all pairs.
struct BlockCounts {
  CountMatrix edges_obs;
  CountMatrix pairs_obs;
  CountMatrix pairs_total;

  int k() const noexcept { return static_cast<int>(edges_obs.rows()); }
};

BlockCounts block_counts(const AdjacencyMatrix& a, const SamplingMask& x, const LabelAssignment& z);

/// sum_{a<=b} edges log q + (pairs - edges) log(1 - q), with 0 log 0 = 0.
/// Returns -infinity when q puts probability 0 or 1 on a contradicting observation.
double log_likelihood_from_counts(const BlockCounts& counts, const BlockMatrix& q);

/// L_X(A; z, Q) over observed pairs i<j. Q is used as given (entries in [0,1]); a
/// -infinity result flags an impossible observation.
double log_likelihood_conditional(const AdjacencyMatrix& a, const SamplingMask& x,
                                  const LabelAssignment& z, const BlockMatrix& q);

/// Empirical mean of the observed entries of each block pair. Blocks with no
/// observed pair fall back to the global observed density (0.5 if X is empty).
BlockMatrix profile_q(const AdjacencyMatrix& a, const SamplingMask& x, const LabelAssignment& z);
BlockMatrix profile_q(const BlockCounts& counts, double fallback);

/// Entrywise clamp to [lo, hi].
BlockMatrix clamp_q(BlockMatrix q, double lo, double hi);

struct MleResult {
  LabelAssignment labels;
  BlockMatrix q;
  double log_likelihood;
};

/// Exhaustive restricted MLE over all k^n labelings. Q is the profile estimate
/// clamped to `bounds` (or to [kProbClamp, 1 - kProbClamp] without bounds).
/// Ties go to the lexicographically smallest label vector.
MleResult brute_force_mle(const AdjacencyMatrix& a, const SamplingMask& x, int k,
                          std::optional<std::pair<double, double>> bounds = std::nullopt);

/// log sum_z prod_i alpha_{z_i} exp(L_X(A; z, Q)) by enumeration.
double log_marginal_likelihood(const AdjacencyMatrix& a, const SamplingMask& x,
                               std::span<const double> alpha, const BlockMatrix& q);

/// log l'_X(A, z; alpha, Q) = sum_i log alpha_{z_i} + L_X(A; z, Q).
double log_complete_likelihood(const AdjacencyMatrix& a, const SamplingMask& x,
                               const LabelAssignment& z, std::span<const double> alpha,
                               const BlockMatrix& q);

/// Throws kCapacity when k^n exceeds the given limit.
void check_enumerable(int n, int k, double limit = kMaxEnumeration);

}  // namespace sbmvar
