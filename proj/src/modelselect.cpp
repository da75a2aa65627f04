#include "sbmvar/modelselect.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "sbmvar/errors.hpp"
#include "sbmvar/estimator.hpp"
#include "sbmvar/likelihood.hpp"

namespace sbmvar {

double icl_score(const AdjacencyMatrix& a, const SamplingMask& x, const FitResult& fit) {
  const int n = a.n();
  const int k = fit.k();
  require(k >= 1 && fit.tau.n() == n, ErrorKind::kConsistency, "fit does not match the graph");
  const VarThetaResult hard = var_theta(a, x, fit.tau);
  double score = log_likelihood_conditional(a, x, hard.labels, hard.q);
  for (int v : hard.labels.z) score += std::log(fit.alpha[v]);
  const double observed_pairs = std::max<double>(static_cast<double>(x.count_pairs()), 1.0);
  score -= 0.5 * (k - 1) * std::log(static_cast<double>(n));
  score -= 0.5 * (k * (k + 1) / 2.0) * std::log(observed_pairs);
  return score;
}

const FitResult& SelectionResult::best_fit() const {
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i].k == k_hat) return fits[i];
  fail(ErrorKind::kConsistency, "no fit recorded for the selected k");
}

SelectionResult select_k(const AdjacencyMatrix& a, const SamplingMask& x,
                         const std::vector<int>& k_range, const EmConfig& cfg) {
  require(!k_range.empty(), ErrorKind::kParameter, "k_range must be non-empty");
  SelectionResult out;
  for (int k : k_range) {
    FitResult fit;
    try {
      fit = fit_varem(a, x, k, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumerical) throw;
      out.warnings.push_back("k = " + std::to_string(k) + " skipped: " + e.what());
      std::clog << "warning: " << out.warnings.back() << '\n';
      continue;
    }
    const double score = icl_score(a, x, fit);
    out.scores.push_back({k, score, fit.converged});
    out.fits.push_back(std::move(fit));
  }
  require(!out.scores.empty(), ErrorKind::kNumerical, "every k in the range failed to fit");
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    const auto& s = out.scores[i];
    const auto& b = out.scores[best];
    if (s.score > b.score || (s.score == b.score && s.k < b.k)) best = i;
  }
  out.k_hat = out.scores[best].k;
  return out;
}

}  // namespace sbmvar
