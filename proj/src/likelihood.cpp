#include "sbmvar/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sbmvar/errors.hpp"

namespace sbmvar {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// count * log(p) with 0 * log(0) = 0.
double xlogy(std::int64_t count, double p) {
  if (count == 0) return 0.0;
  return static_cast<double>(count) * std::log(p);
}

// Block counts maintained under single-node label changes, for enumeration.
class IncrementalCounts {
 public:
  IncrementalCounts(const AdjacencyMatrix& a, const SamplingMask& x, int k)
      : a_(a), x_(x), z_(static_cast<std::size_t>(a.n()), 0) {
    counts_.edges_obs = CountMatrix::Zero(k, k);
    counts_.pairs_obs = CountMatrix::Zero(k, k);
    counts_.pairs_total = CountMatrix::Zero(k, k);
    const int n = a.n();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) add_pair(i, j, 0, 0, +1);
  }

  const std::vector<int>& labels() const { return z_; }
  const BlockCounts& counts() const { return counts_; }

  void relabel(int i, int to) {
    const int from = z_[i];
    if (from == to) return;
    for (int j = 0; j < a_.n(); ++j) {
      if (j == i) continue;
      add_pair(i, j, from, z_[j], -1);
      add_pair(i, j, to, z_[j], +1);
    }
    z_[i] = to;
  }

 private:
  void add_pair(int i, int j, int za, int zb, int sign) {
    const int lo = std::min(za, zb), hi = std::max(za, zb);
    const bool obs = x_(i, j);
    const bool edge = obs && a_(i, j);
    counts_.pairs_total(lo, hi) += sign;
    counts_.pairs_obs(lo, hi) += sign * obs;
    counts_.edges_obs(lo, hi) += sign * edge;
  }

  const AdjacencyMatrix& a_;
  const SamplingMask& x_;
  std::vector<int> z_;
  BlockCounts counts_;  // upper triangle only
};

BlockCounts mirrored(const BlockCounts& upper) {
  BlockCounts c = upper;
  for (int a = 0; a < c.k(); ++a)
    for (int b = 0; b < a; ++b) {
      c.edges_obs(a, b) = c.edges_obs(b, a);
      c.pairs_obs(a, b) = c.pairs_obs(b, a);
      c.pairs_total(a, b) = c.pairs_total(b, a);
    }
  return c;
}

// Visits every labeling in lexicographic order (last node varies fastest).
template <class Visit>
void enumerate_labelings(const AdjacencyMatrix& a, const SamplingMask& x, int k, Visit&& visit) {
  const int n = a.n();
  IncrementalCounts state(a, x, k);
  visit(state);
  if (n == 0) return;
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  while (true) {
    int pos = n - 1;
    while (pos >= 0 && digits[pos] == k - 1) --pos;
    if (pos < 0) return;
    ++digits[pos];
    state.relabel(pos, digits[pos]);
    for (int i = pos + 1; i < n; ++i) {
      digits[i] = 0;
      state.relabel(i, 0);
    }
    visit(state);
  }
}

double log_sum_exp_add(double acc, double term) {
  if (term == kNegInf) return acc;
  if (acc == kNegInf) return term;
  const double hi = std::max(acc, term);
  return hi + std::log1p(std::exp(std::min(acc, term) - hi));
}

}  // namespace

void check_enumerable(int n, int k, double limit) {
  const double size = std::pow(static_cast<double>(k), static_cast<double>(n));
  require(size <= limit, ErrorKind::kCapacity,
          "enumeration of k^n = " + std::to_string(k) + "^" + std::to_string(n) +
              " labelings exceeds the limit");
}

BlockCounts block_counts(const AdjacencyMatrix& a, const SamplingMask& x, const LabelAssignment& z) {
  check_same_size(a, x);
  z.validate();
  require(z.n() == a.n(), ErrorKind::kConsistency, "labels and graph differ in size");
  const int k = z.k;
  BlockCounts c{CountMatrix::Zero(k, k), CountMatrix::Zero(k, k), CountMatrix::Zero(k, k)};
  const int n = a.n();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int lo = std::min(z.z[i], z.z[j]), hi = std::max(z.z[i], z.z[j]);
      ++c.pairs_total(lo, hi);
      if (x(i, j)) {
        ++c.pairs_obs(lo, hi);
        c.edges_obs(lo, hi) += a(i, j);
      }
    }
  }
  return mirrored(c);
}

double log_likelihood_from_counts(const BlockCounts& counts, const BlockMatrix& q) {
  double total = 0.0;
  for (int a = 0; a < counts.k(); ++a) {
    for (int b = a; b < counts.k(); ++b) {
      const std::int64_t edges = counts.edges_obs(a, b);
      const std::int64_t non_edges = counts.pairs_obs(a, b) - edges;
      const double p = q(a, b);
      if ((edges > 0 && p <= 0.0) || (non_edges > 0 && p >= 1.0)) return kNegInf;
      total += xlogy(edges, p) + xlogy(non_edges, 1.0 - p);
    }
  }
  return total;
}

double log_likelihood_conditional(const AdjacencyMatrix& a, const SamplingMask& x,
                                  const LabelAssignment& z, const BlockMatrix& q) {
  require(q.rows() >= z.k && q.cols() == q.rows(), ErrorKind::kConsistency,
          "connectivity matrix smaller than label range");
  return log_likelihood_from_counts(block_counts(a, x, z), q);
}

BlockMatrix profile_q(const BlockCounts& counts, double fallback) {
  const int k = counts.k();
  BlockMatrix q(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const auto pairs = counts.pairs_obs(a, b);
      q(a, b) = pairs > 0 ? static_cast<double>(counts.edges_obs(a, b)) / static_cast<double>(pairs)
                          : fallback;
    }
  return q;
}

BlockMatrix profile_q(const AdjacencyMatrix& a, const SamplingMask& x, const LabelAssignment& z) {
  return profile_q(block_counts(a, x, z), observed_density(a, x));
}

BlockMatrix clamp_q(BlockMatrix q, double lo, double hi) {
  return q.cwiseMax(lo).cwiseMin(hi);
}

MleResult brute_force_mle(const AdjacencyMatrix& a, const SamplingMask& x, int k,
                          std::optional<std::pair<double, double>> bounds) {
  check_same_size(a, x);
  require(k >= 1, ErrorKind::kParameter, "k must be >= 1");
  check_enumerable(a.n(), k);
  double lo = kProbClamp, hi = 1.0 - kProbClamp;
  if (bounds) {
    std::tie(lo, hi) = *bounds;
    require(lo > 0.0 && lo <= hi && hi < 1.0, ErrorKind::kParameter,
            "bounds must satisfy 0 < gamma <= rho_bar < 1");
  }
  const double fallback = observed_density(a, x);

  MleResult best{LabelAssignment{k, {}}, BlockMatrix(), kNegInf};
  enumerate_labelings(a, x, k, [&](const IncrementalCounts& state) {
    const BlockCounts counts = mirrored(state.counts());
    BlockMatrix q = clamp_q(profile_q(counts, fallback), lo, hi);
    const double value = log_likelihood_from_counts(counts, q);
    // Relabelings of an optimum differ only in summation order; treat those as ties.
    if (best.labels.z.empty() || value > best.log_likelihood + 1e-12 * (1.0 + std::abs(best.log_likelihood))) {
      best.labels.z = state.labels();
      best.q = std::move(q);
      best.log_likelihood = value;
    }
  });
  return best;
}

double log_marginal_likelihood(const AdjacencyMatrix& a, const SamplingMask& x,
                               std::span<const double> alpha, const BlockMatrix& q) {
  check_same_size(a, x);
  const int k = static_cast<int>(alpha.size());
  require(k >= 1 && q.rows() == k && q.cols() == k, ErrorKind::kConsistency,
          "alpha and q disagree on k");
  check_enumerable(a.n(), k);
  std::vector<double> log_alpha(alpha.size());
  std::transform(alpha.begin(), alpha.end(), log_alpha.begin(),
                 [](double v) { return std::log(v); });

  double acc = kNegInf;
  enumerate_labelings(a, x, k, [&](const IncrementalCounts& state) {
    double prior = 0.0;
    for (int v : state.labels()) prior += log_alpha[v];
    acc = log_sum_exp_add(acc, prior + log_likelihood_from_counts(mirrored(state.counts()), q));
  });
  return acc;
}

double log_complete_likelihood(const AdjacencyMatrix& a, const SamplingMask& x,
                               const LabelAssignment& z, std::span<const double> alpha,
                               const BlockMatrix& q) {
  require(static_cast<int>(alpha.size()) >= z.k, ErrorKind::kConsistency,
          "alpha shorter than label range");
  double prior = 0.0;
  for (int v : z.z) prior += std::log(alpha[v]);
  return prior + log_likelihood_conditional(a, x, z, q);
}

}  // namespace sbmvar
