#include "sbmvar/varem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sbmvar/errors.hpp"
#include "sbmvar/kernels.hpp"
#include "sbmvar/kmeans.hpp"
#include "sbmvar/likelihood.hpp"
#include "sbmvar/linalg.hpp"
#include "sbmvar/rng.hpp"

namespace sbmvar {
namespace {

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

// Ordered-pair sufficient statistics N1 = tau' (X.*A) tau and N0 = tau' (X.*(1-A)) tau.
struct PairStats {
  Eigen::MatrixXd edges;
  Eigen::MatrixXd non_edges;
};

PairStats pair_stats(const ObservedGraph& g, const Eigen::MatrixXd& tau) {
  const Eigen::Index n = tau.rows(), k = tau.cols();
  PairStats s{Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
  Eigen::VectorXd e1(k), e0(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto edges_i = column(g.observed_edges, i);
    const auto non_edges_i = column(g.observed_non_edges, i);
    for (Eigen::Index b = 0; b < k; ++b) {
      e1(b) = kernels::dot(edges_i, column(tau, b));
      e0(b) = kernels::dot(non_edges_i, column(tau, b));
    }
    s.edges.noalias() += tau.row(i).transpose() * e1.transpose();
    s.non_edges.noalias() += tau.row(i).transpose() * e0.transpose();
  }
  return s;
}

double xlog(double weight, double p) { return weight == 0.0 ? 0.0 : weight * std::log(p); }

void check_shapes(const ObservedGraph& g, const Eigen::MatrixXd& tau, std::size_t alpha_size,
                  const BlockMatrix& q) {
  require(tau.rows() == g.n(), ErrorKind::kConsistency, "tau rows differ from node count");
  require(static_cast<std::size_t>(tau.cols()) == alpha_size && q.rows() == tau.cols() &&
              q.cols() == tau.cols(),
          ErrorKind::kConsistency, "tau, alpha and q disagree on k");
}

}  // namespace

void normalize_row(Eigen::RowVectorXd& row) {
  for (int pass = 0; pass < 4; ++pass) {
    row = row.cwiseMax(kTauFloor);
    row /= row.sum();
    if (row.minCoeff() >= kTauFloor) return;
  }
  // Re-scaling nudged a floored entry a hair below the floor: pin it there.
  const Eigen::Index k = row.size();
  double floored = 0.0, rest = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) {
    if (row(a) <= kTauFloor) {
      row(a) = kTauFloor;
      floored += kTauFloor;
    } else {
      rest += row(a);
    }
  }
  for (Eigen::Index a = 0; a < k; ++a)
    if (row(a) > kTauFloor) row(a) *= (1.0 - floored) / rest;
}

void VariationalPosterior::validate(double tol) const {
  require(tau.rows() >= 1 && tau.cols() >= 1, ErrorKind::kConsistency, "empty posterior");
  for (Eigen::Index i = 0; i < tau.rows(); ++i) {
    require(std::abs(tau.row(i).sum() - 1.0) <= tol, ErrorKind::kConsistency,
            "posterior row " + std::to_string(i + 1) + " does not sum to 1");
    require(tau.row(i).minCoeff() >= 0.0 && tau.row(i).maxCoeff() <= 1.0 + tol,
            ErrorKind::kConsistency, "posterior entries must lie in [0, 1]");
  }
}

VariationalPosterior VariationalPosterior::uniform(int n, int k) {
  return VariationalPosterior(Eigen::MatrixXd::Constant(n, k, 1.0 / k));
}

VariationalPosterior VariationalPosterior::one_hot(const LabelAssignment& z) {
  z.validate();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(z.n(), z.k);
  for (int i = 0; i < z.n(); ++i) t(i, z.z[i]) = 1.0;
  return VariationalPosterior(std::move(t));
}

void EmConfig::validate() const {
  require(max_iter >= 1, ErrorKind::kParameter, "max_iter must be >= 1");
  require(tol > 0.0, ErrorKind::kParameter, "tol must be > 0");
  require(restarts >= 1, ErrorKind::kParameter, "restarts must be >= 1");
  require(damping >= 0.0 && damping < 1.0, ErrorKind::kParameter, "damping must lie in [0, 1)");
  require(fixed_point_sweeps >= 1, ErrorKind::kParameter, "fixed_point_sweeps must be >= 1");
}

double elbo(const ObservedGraph& g, const VariationalPosterior& tau, std::span<const double> alpha,
            const BlockMatrix& q) {
  check_shapes(g, tau.tau, alpha.size(), q);
  const Eigen::Index k = tau.tau.cols();
  double prior_entropy = 0.0;
  for (Eigen::Index i = 0; i < tau.tau.rows(); ++i)
    for (Eigen::Index a = 0; a < k; ++a) {
      const double t = tau.tau(i, a);
      if (t > 0.0) prior_entropy += t * (std::log(alpha[a]) - std::log(t));
    }
  const PairStats s = pair_stats(g, tau.tau);
  double pairs = 0.0;
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      pairs += xlog(s.edges(a, b), q(a, b)) + xlog(s.non_edges(a, b), 1.0 - q(a, b));
  // Ordered pairs count each unordered pair twice.
  return prior_entropy + 0.5 * pairs;
}

double elbo(const AdjacencyMatrix& a, const SamplingMask& x, const VariationalPosterior& tau,
            std::span<const double> alpha, const BlockMatrix& q) {
  return elbo(ObservedGraph(a, x), tau, alpha, q);
}

VariationalPosterior e_step(const ObservedGraph& g, VariationalPosterior tau,
                            std::span<const double> alpha, const BlockMatrix& q, int sweeps,
                            double damping) {
  check_shapes(g, tau.tau, alpha.size(), q);
  require(sweeps >= 0, ErrorKind::kParameter, "sweeps must be >= 0");
  require(damping >= 0.0 && damping < 1.0, ErrorKind::kParameter, "damping must lie in [0, 1)");
  const Eigen::Index n = tau.tau.rows(), k = tau.tau.cols();
  const BlockMatrix qc = clamp_q(q, kProbClamp, 1.0 - kProbClamp);
  const Eigen::MatrixXd log_q = qc.array().log().matrix();
  const Eigen::MatrixXd log_1mq = (1.0 - qc.array()).log().matrix();
  Eigen::RowVectorXd log_alpha(k);
  for (Eigen::Index a = 0; a < k; ++a) log_alpha(a) = std::log(alpha[a]);

  Eigen::VectorXd e1(k), e0(k);
  Eigen::RowVectorXd row(k);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto edges_i = column(g.observed_edges, i);
      const auto non_edges_i = column(g.observed_non_edges, i);
      for (Eigen::Index b = 0; b < k; ++b) {
        e1(b) = kernels::dot(edges_i, column(tau.tau, b));
        e0(b) = kernels::dot(non_edges_i, column(tau.tau, b));
      }
      row = log_alpha + (log_q * e1 + log_1mq * e0).transpose();
      row = (row.array() - row.maxCoeff()).exp().matrix();
      row /= row.sum();
      if (damping > 0.0) row = (1.0 - damping) * row + damping * tau.tau.row(i);
      normalize_row(row);
      tau.tau.row(i) = row;
    }
  }
  return tau;
}

VariationalPosterior e_step(const AdjacencyMatrix& a, const SamplingMask& x,
                            VariationalPosterior tau, std::span<const double> alpha,
                            const BlockMatrix& q, int sweeps, double damping) {
  return e_step(ObservedGraph(a, x), std::move(tau), alpha, q, sweeps, damping);
}

MStepResult m_step(const ObservedGraph& g, const VariationalPosterior& tau) {
  require(tau.tau.rows() == g.n(), ErrorKind::kConsistency, "tau rows differ from node count");
  const Eigen::Index n = tau.tau.rows(), k = tau.tau.cols();
  MStepResult r;
  r.alpha.resize(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) r.alpha[a] = tau.tau.col(a).sum() / static_cast<double>(n);

  const PairStats s = pair_stats(g, tau.tau);
  const double fallback = g.density();
  r.q.resize(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a; b < k; ++b) {
      const double num = 0.5 * (s.edges(a, b) + s.edges(b, a));
      const double den = num + 0.5 * (s.non_edges(a, b) + s.non_edges(b, a));
      const double v = den > 0.0 ? num / den : fallback;
      r.q(a, b) = r.q(b, a) = std::clamp(v, kProbClamp, 1.0 - kProbClamp);
    }
  return r;
}

MStepResult m_step(const AdjacencyMatrix& a, const SamplingMask& x, const VariationalPosterior& tau) {
  return m_step(ObservedGraph(a, x), tau);
}

VariationalPosterior init_tau(const AdjacencyMatrix& a, const SamplingMask& x, int k,
                              std::uint64_t seed) {
  check_same_size(a, x);
  const int n = a.n();
  require(k >= 1, ErrorKind::kParameter, "k must be >= 1");
  require(k <= n, ErrorKind::kParameter,
          "k = " + std::to_string(k) + " exceeds the node count " + std::to_string(n));
  if (k == 1) return VariationalPosterior(Eigen::MatrixXd::Ones(n, 1));

  const double density = observed_density(a, x);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m(i, j) = i == j ? 0.0 : (x(i, j) ? static_cast<double>(a(i, j)) : density);

  const Eigen::MatrixXd embedding = top_abs_eigenpairs(m, k).vectors;

  const KMeansResult clusters = kmeans(embedding, k, derive_seed(seed, "init"));
  const double soft = std::min(kInitSoftMass, 0.5 / (k - 1));
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, k, soft);
  for (int i = 0; i < n; ++i) t(i, clusters.assignment[i]) = 1.0 - (k - 1) * soft;
  return VariationalPosterior(std::move(t));
}

FitResult fit_varem(const AdjacencyMatrix& a, const SamplingMask& x, int k, const EmConfig& cfg) {
  cfg.validate();
  const ObservedGraph g(a, x);
  const VariationalPosterior start = init_tau(a, x, k, cfg.seed);

  FitResult best;
  bool have_best = false;
  std::vector<double> restart_elbos;
  std::vector<std::string> diagnostics;
  for (int r = 0; r < cfg.restarts; ++r) {
    VariationalPosterior tau = start;
    if (r > 0) {
      Rng rng(cfg.seed, "restart", static_cast<std::uint64_t>(r));
      for (Eigen::Index i = 0; i < tau.tau.rows(); ++i) {
        Eigen::RowVectorXd row = tau.tau.row(i);
        for (Eigen::Index c = 0; c < k; ++c) row(c) *= std::exp(0.5 * rng.normal());
        normalize_row(row);
        tau.tau.row(i) = row;
      }
    }

    MStepResult params = m_step(g, tau);
    double previous = elbo(g, tau, params.alpha, params.q);
    FitResult run;
    bool failed = !std::isfinite(previous);
    for (int iter = 0; iter < cfg.max_iter && !failed; ++iter) {
      if (iter > 0) params = m_step(g, tau);
      tau = e_step(g, std::move(tau), params.alpha, params.q, cfg.fixed_point_sweeps, cfg.damping);
      const double current = elbo(g, tau, params.alpha, params.q);
      if (!std::isfinite(current)) {
        failed = true;
        break;
      }
      run.elbo_trace.push_back(current);
      run.iterations = iter + 1;
      if (std::abs(current - previous) / (1.0 + std::abs(current)) < cfg.tol) {
        run.converged = true;
        break;
      }
      previous = current;
    }
    if (failed) {
      std::ostringstream msg;
      msg << "restart " << r << ": non-finite ELBO after " << run.iterations
          << " iterations; restart discarded";
      diagnostics.push_back(msg.str());
      restart_elbos.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    restart_elbos.push_back(run.elbo_trace.back());
    if (!have_best || run.elbo_trace.back() > best.final_elbo()) {
      run.tau = std::move(tau);
      run.alpha = std::move(params.alpha);
      run.q = std::move(params.q);
      run.restart_index = r;
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) {
    std::string all = "every restart failed";
    for (const auto& d : diagnostics) all += "\n  " + d;
    fail(ErrorKind::kNumerical, all);
  }
  best.restart_elbos = std::move(restart_elbos);
  best.diagnostics = std::move(diagnostics);
  return best;
}

}  // namespace sbmvar
