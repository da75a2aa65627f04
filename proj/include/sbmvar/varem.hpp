#pragma once

// Mean-field variational EM for the SBM observed through a sampling mask.
//
// The ELBO is evaluated in its explicit mean-field form
//   J = sum_i sum_a tau_ia log(alpha_a / tau_ia)
//     + sum_{i<j} X_ij sum_{a,b} tau_ia tau_jb [A_ij log Q_ab + (1 - A_ij) log(1 - Q_ab)]
// which equals log l_X(A; alpha, Q) - KL(P_tau || P(. | X.*A)).

#include <cstdint>
#include <string>
#include <vector>

#include "sbmvar/netcore.hpp"

namespace sbmvar {

/// Floor applied to every responsibility after normalisation.
inline constexpr double kTauFloor = 1e-15;
/// Off-community mass of the hard-cluster initialisation.
inline constexpr double kInitSoftMass = 0.05;

/// n x k row-stochastic matrix of community responsibilities.
struct VariationalPosterior {
  Eigen::MatrixXd tau;

  VariationalPosterior() = default;
  explicit VariationalPosterior(Eigen::MatrixXd t) : tau(std::move(t)) {}
  int n() const noexcept { return static_cast<int>(tau.rows()); }
  int k() const noexcept { return static_cast<int>(tau.cols()); }
  void validate(double tol = 1e-10) const;

  static VariationalPosterior uniform(int n, int k);
  static VariationalPosterior one_hot(const LabelAssignment& z);
};

struct EmConfig {
  int max_iter = 100;
  double tol = 1e-6;  // on |dJ| / (1 + |J|)
  int restarts = 5;
  double damping = 0.0;
  std::uint64_t seed = 0;
  int fixed_point_sweeps = 3;

  void validate() const;
};

struct FitResult {
  VariationalPosterior tau;
  std::vector<double> alpha;
  BlockMatrix q;
  std::vector<double> elbo_trace;
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
  std::vector<double> restart_elbos;     // final ELBO per restart, NaN when discarded
  std::vector<std::string> diagnostics;  // one line per discarded restart

  int k() const noexcept { return static_cast<int>(alpha.size()); }
  double final_elbo() const { return elbo_trace.back(); }
};

struct MStepResult {
  std::vector<double> alpha;
  BlockMatrix q;
};

double elbo(const ObservedGraph& g, const VariationalPosterior& tau, std::span<const double> alpha,
            const BlockMatrix& q);
double elbo(const AdjacencyMatrix& a, const SamplingMask& x, const VariationalPosterior& tau,
            std::span<const double> alpha, const BlockMatrix& q);

/// `sweeps` sequential passes of the fixed-point update over nodes in index
/// order, each row computed in log domain then normalised. With damping d the
/// new row is (1 - d) * update + d * old.
VariationalPosterior e_step(const ObservedGraph& g, VariationalPosterior tau,
                            std::span<const double> alpha, const BlockMatrix& q, int sweeps,
                            double damping = 0.0);
VariationalPosterior e_step(const AdjacencyMatrix& a, const SamplingMask& x,
                            VariationalPosterior tau, std::span<const double> alpha,
                            const BlockMatrix& q, int sweeps, double damping = 0.0);

/// Closed-form maximiser of the ELBO in (alpha, Q), Q clamped to
/// [kProbClamp, 1 - kProbClamp]; empty blocks take the observed density.
MStepResult m_step(const ObservedGraph& g, const VariationalPosterior& tau);
MStepResult m_step(const AdjacencyMatrix& a, const SamplingMask& x, const VariationalPosterior& tau);

/// Spectral clustering of the density-imputed adjacency matrix, softened to
/// 1 - (k - 1) * eps on the assigned community and eps elsewhere.
VariationalPosterior init_tau(const AdjacencyMatrix& a, const SamplingMask& x, int k,
                              std::uint64_t seed);

FitResult fit_varem(const AdjacencyMatrix& a, const SamplingMask& x, int k, const EmConfig& cfg);

/// Clamps entries to kTauFloor and rescales so the row sums to one.
void normalize_row(Eigen::RowVectorXd& row);

}  // namespace sbmvar
