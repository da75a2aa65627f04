#include "sbmvar/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sbmvar/errors.hpp"
#include "sbmvar/kernels.hpp"

namespace sbmvar {
namespace {

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

void check_theta_size(const ThetaMatrix& t, int n) {
  require(t.n() == n && t.values.cols() == n, ErrorKind::kConsistency,
          "dimension mismatch: " + std::to_string(t.n()) + " vs " + std::to_string(n));
}

}  // namespace

double frobenius_error(const ThetaMatrix& theta_hat, const ThetaMatrix& theta_star) {
  check_theta_size(theta_hat, theta_star.n());
  check_theta_size(theta_star, theta_hat.n());
  const int n = theta_hat.n();
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    total += kernels::squared_distance(column(theta_hat.values, j), column(theta_star.values, j));
  // Diagonals are zero by invariant; remove any residue so the sum is over i != j.
  for (int i = 0; i < n; ++i) {
    const double d = theta_hat(i, i) - theta_star(i, i);
    total -= d * d;
  }
  return total;
}

double normalized_sparse_error(const ThetaMatrix& theta_hat, const ThetaMatrix& theta_star,
                               double rho) {
  require(rho > 0.0, ErrorKind::kParameter, "rho must be > 0");
  return frobenius_error(theta_hat, theta_star) / (rho * rho);
}

std::int64_t misclassified(const LabelAssignment& z_hat, const LabelAssignment& z_star) {
  require(z_hat.n() == z_star.n(), ErrorKind::kConsistency, "label vectors differ in length");
  z_hat.validate();
  z_star.validate();
  const int k = std::max(z_hat.k, z_star.k);
  require(k <= kMaxPermutationK, ErrorKind::kCapacity,
          "exact permutation search supports k <= " + std::to_string(kMaxPermutationK));
  // agree[a][b] = #{i : z_hat(i) = a, z_star(i) = b}
  std::vector<std::int64_t> agree(static_cast<std::size_t>(k * k), 0);
  for (int i = 0; i < z_hat.n(); ++i) ++agree[z_hat.z[i] * k + z_star.z[i]];
  std::vector<int> sigma(static_cast<std::size_t>(k));
  std::iota(sigma.begin(), sigma.end(), 0);
  std::int64_t best = 0;
  do {
    std::int64_t matched = 0;
    for (int a = 0; a < k; ++a) matched += agree[a * k + sigma[a]];
    best = std::max(best, matched);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return z_hat.n() - best;
}

PrCurve precision_recall(const ThetaMatrix& theta_hat, const AdjacencyMatrix& a_test,
                         const SamplingMask& eval_mask) {
  check_same_size(a_test, eval_mask);
  check_theta_size(theta_hat, a_test.n());
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> pairs;
  const int n = a_test.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (eval_mask(i, j)) pairs.push_back({theta_hat(i, j), a_test(i, j)});

  PrCurve curve;
  for (const auto& p : pairs) curve.positives += p.positive;
  require(curve.positives > 0, ErrorKind::kDegenerate,
          "precision-recall needs at least one positive pair on the evaluation mask");
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Scored& l, const Scored& r) { return l.score > r.score; });

  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    const double t = pairs[i].score;
    for (; i < pairs.size() && pairs[i].score == t; ++i) (pairs[i].positive ? tp : fp) += 1;
    const double precision =
        tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.points.push_back(
        {t, precision, static_cast<double>(tp) / static_cast<double>(curve.positives)});
  }
  return curve;
}

double average_precision(const PrCurve& curve) {
  double area = 0.0, previous_recall = 0.0;
  for (const auto& p : curve.points) {
    area += p.precision * (p.recall - previous_recall);
    previous_recall = p.recall;
  }
  return area;
}

double heldout_error(const ThetaMatrix& theta_hat, const AdjacencyMatrix& a,
                     const SamplingMask& x_train) {
  check_same_size(a, x_train);
  check_theta_size(theta_hat, a.n());
  const int n = a.n();
  Eigen::MatrixXd held = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(n, n);
  bool any = false;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && !x_train(i, j)) {
        held(i, j) = 1.0;
        truth(i, j) = a(i, j);
        any = true;
      }
  require(any, ErrorKind::kDegenerate, "no held-out pairs: the training mask is full");
  double num = 0.0, den = 0.0;
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    num += kernels::weighted_squared_distance(column(truth, j), column(theta_hat.values, j),
                                              column(held, j));
    den += kernels::weighted_squared_distance(column(truth, j), {zeros.data(), static_cast<std::size_t>(n)},
                                              column(held, j));
  }
  require(den > 0.0, ErrorKind::kDegenerate, "no held-out edges: normalisation is zero");
  return num / den;
}

}  // namespace sbmvar
