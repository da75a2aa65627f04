#include "sbmvar/baseline_svt.hpp"

#include <algorithm>
#include <cmath>

#include "sbmvar/errors.hpp"
#include "sbmvar/linalg.hpp"

namespace sbmvar {
namespace {

struct LowRank {
  Eigen::MatrixXd matrix;
  double nuclear_norm = 0.0;
};

LowRank shrink_truncate(const Eigen::MatrixXd& w, int rank, double lambda) {
  const Eigen::Index keep = std::min<Eigen::Index>(rank, w.rows());
  const Eigenpairs eig = top_abs_eigenpairs(w, static_cast<int>(keep));
  Eigen::VectorXd scale(keep);
  LowRank out;
  for (Eigen::Index c = 0; c < keep; ++c) {
    const double lam = eig.values(c);
    const double s = std::max(std::abs(lam) - lambda, 0.0);
    scale(c) = std::copysign(s, lam);
    out.nuclear_norm += s;
  }
  out.matrix.noalias() = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
  return out;
}

}  // namespace

void SvtConfig::validate() const {
  require(rank >= 1, ErrorKind::kParameter, "svt rank must be >= 1");
  require(lambda >= 0.0, ErrorKind::kParameter, "svt lambda must be >= 0");
  require(max_iter >= 1, ErrorKind::kParameter, "svt max_iter must be >= 1");
  require(tol > 0.0, ErrorKind::kParameter, "svt tol must be > 0");
}

SoftImputeResult soft_impute_detailed(const AdjacencyMatrix& a, const SamplingMask& x,
                                      const SvtConfig& cfg) {
  cfg.validate();
  check_same_size(a, x);
  const int n = a.n();
  Eigen::MatrixXd observed = Eigen::MatrixXd::Zero(n, n);  // 1 on observed pairs
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, n);    // A on observed pairs
  double edges = 0.0, pairs = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && x(i, j)) {
        observed(i, j) = 1.0;
        target(i, j) = a(i, j);
        pairs += 1.0;
        edges += a(i, j);
      }
  const double mean = pairs > 0.0 ? edges / pairs : 0.5;
  const Eigen::MatrixXd missing = Eigen::MatrixXd::Ones(n, n) - observed;

  auto objective = [&](const Eigen::MatrixXd& m, double nuclear) {
    return 0.5 * (observed.array() * (target - m).array()).square().sum() + cfg.lambda * nuclear;
  };

  SoftImputeResult r;
  Eigen::MatrixXd estimate = Eigen::MatrixXd::Constant(n, n, mean);
  r.objective_trace.push_back(objective(estimate, std::abs(mean) * n));
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const Eigen::MatrixXd working = target + missing.cwiseProduct(estimate);
    LowRank next = shrink_truncate(working, cfg.rank, cfg.lambda);
    const double change = (next.matrix - estimate).norm();
    const double size = std::max(estimate.norm(), 1e-300);
    estimate = std::move(next.matrix);
    r.objective_trace.push_back(objective(estimate, next.nuclear_norm));
    r.iterations = iter + 1;
    if (change / size < cfg.tol) {
      r.converged = true;
      break;
    }
  }
  Eigen::MatrixXd out = (0.5 * (estimate + estimate.transpose())).cwiseMax(0.0).cwiseMin(1.0);
  out.diagonal().setZero();
  r.theta = ThetaMatrix(std::move(out));
  return r;
}

ThetaMatrix soft_impute(const AdjacencyMatrix& a, const SamplingMask& x, const SvtConfig& cfg) {
  return soft_impute_detailed(a, x, cfg).theta;
}

}  // namespace sbmvar
