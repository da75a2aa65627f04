#include "sbmvar/estimator.hpp"

#include <iostream>

#include "sbmvar/errors.hpp"
#include "sbmvar/likelihood.hpp"

namespace sbmvar {

LabelAssignment extract_labels(const VariationalPosterior& tau) {
  const int n = tau.n(), k = tau.k();
  LabelAssignment z{k, std::vector<int>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int a = 1; a < k; ++a)
      if (tau.tau(i, a) > tau.tau(i, best)) best = a;
    z.z[i] = best;
  }
  return z;
}

VarThetaResult var_theta(const AdjacencyMatrix& a, const SamplingMask& x,
                         const VariationalPosterior& tau) {
  require(tau.n() == a.n(), ErrorKind::kConsistency, "tau rows differ from node count");
  LabelAssignment z = extract_labels(tau);
  BlockMatrix q = clamp_q(profile_q(a, x, z), kProbClamp, 1.0 - kProbClamp);
  ThetaMatrix theta = theta_from(z, q);
  return {std::move(z), std::move(q), std::move(theta)};
}

ThetaMatrix oracle_theta(const AdjacencyMatrix& a, const SamplingMask& x,
                         const LabelAssignment& z_true) {
  require(z_true.n() == a.n(), ErrorKind::kConsistency, "labels and graph differ in size");
  return theta_from(z_true, clamp_q(profile_q(a, x, z_true), kProbClamp, 1.0 - kProbClamp));
}

ThetaMatrix trivial_theta(const AdjacencyMatrix& a, const SamplingMask& x) {
  check_same_size(a, x);
  const int n = a.n();
  if (x.count_pairs() == 0)
    std::clog << "warning: empty sampling mask; trivial estimator set to 0.5\n";
  const double density = observed_density(a, x);
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, n, density);
  t.diagonal().setZero();
  return ThetaMatrix(std::move(t));
}

ThetaMatrix naive_persistent_theta(const AdjacencyMatrix& a, const SamplingMask& x) {
  check_same_size(a, x);
  const int n = a.n();
  std::int64_t observed_degree_sum = 0;  // sum_i sum_j X_ij A_ij (ordered pairs)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) observed_degree_sum += x(i, j) && a(i, j);
  const double mean_degree = n > 0 ? static_cast<double>(observed_degree_sum) / n : 0.0;
  const double fill = n > 0 ? mean_degree / n : 0.0;
  Eigen::MatrixXd t(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      t(i, j) = i == j ? 0.0 : (x(i, j) ? static_cast<double>(a(i, j)) : fill);
  return ThetaMatrix(std::move(t));
}

}  // namespace sbmvar
