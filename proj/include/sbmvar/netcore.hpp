#pragma once

// Graph data types, SBM generation and missing-observation masks.
//
// All n x n objects are dense and symmetric; only the upper triangle is
// authoritative and every mutator writes both halves. Community labels are
// 0-based in memory and 1-based in files.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sbmvar {

using BlockMatrix = Eigen::MatrixXd;  // k x k, symmetric

/// Symmetric {0,1} matrix with zero diagonal.
class BinarySymMatrix {
 public:
  BinarySymMatrix() = default;
  explicit BinarySymMatrix(int n);

  int n() const noexcept { return n_; }
  bool operator()(int i, int j) const noexcept {
    return bits_[static_cast<std::size_t>(i) * n_ + j] != 0;
  }
  /// Sets (i,j) and (j,i). Diagonal writes are rejected.
  void set(int i, int j, bool value);
  /// Number of unordered pairs i<j that are set.
  std::int64_t count_pairs() const noexcept;
  /// Checks symmetry and zero diagonal; throws kConsistency.
  void validate() const;

  std::span<const std::uint8_t> row(int i) const noexcept {
    return {bits_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

  friend bool operator==(const BinarySymMatrix&, const BinarySymMatrix&) = default;

 protected:
  int n_ = 0;
  std::vector<std::uint8_t> bits_;
};

class AdjacencyMatrix : public BinarySymMatrix {
 public:
  using BinarySymMatrix::BinarySymMatrix;
};

class SamplingMask : public BinarySymMatrix {
 public:
  using BinarySymMatrix::BinarySymMatrix;
  /// Every off-diagonal pair observed.
  static SamplingMask full(int n);
};

struct SbmParams {
  std::vector<double> alpha;
  BlockMatrix q;
  std::optional<double> rho;
  std::optional<std::pair<double, double>> bounds;  // (gamma, rho_bar)

  int k() const noexcept { return static_cast<int>(alpha.size()); }
  /// rho * q, or q when rho is absent.
  BlockMatrix effective_q() const;
  /// Throws kParameter on any violated invariant.
  void validate() const;
};

struct LabelAssignment {
  int k = 0;
  std::vector<int> z;  // values in [0, k)

  int n() const noexcept { return static_cast<int>(z.size()); }
  void validate() const;
  std::vector<int> community_sizes() const;
  friend bool operator==(const LabelAssignment&, const LabelAssignment&) = default;
};

/// Symmetric n x n matrix of probabilities with zero diagonal.
struct ThetaMatrix {
  Eigen::MatrixXd values;

  ThetaMatrix() = default;
  explicit ThetaMatrix(Eigen::MatrixXd m) : values(std::move(m)) {}
  int n() const noexcept { return static_cast<int>(values.rows()); }
  double operator()(int i, int j) const { return values(i, j); }
  void validate(double tol = 0.0) const;
};

struct GeneratedGraph {
  LabelAssignment labels;
  AdjacencyMatrix adjacency;
  ThetaMatrix theta;
};

/// Labels i.i.d. from alpha ("labels" stream), then A_ij ~ Bernoulli(rho Q_{z_i z_j})
/// for i<j ("edges" stream).
GeneratedGraph generate_sbm(const SbmParams& params, int n, std::uint64_t seed);

/// Upper-triangular entries i.i.d. Bernoulli(p) from the "mask" stream.
SamplingMask generate_mask(int n, double p, std::uint64_t seed);

BlockMatrix scale_sparsity(const BlockMatrix& q0, double rho);

ThetaMatrix theta_from(const LabelAssignment& z, const BlockMatrix& q);

/// Checks q square, symmetric, entries within [lo, hi].
void validate_block_matrix(const BlockMatrix& q, double lo, double hi, bool open_interval);

/// Dense double views of the observed part of a graph, used by the variational
/// kernels: observed_edges = X.*A and observed_non_edges = X.*(1-A), both
/// column-major n x n.
struct ObservedGraph {
  Eigen::MatrixXd observed_edges;
  Eigen::MatrixXd observed_non_edges;
  std::int64_t edge_pairs = 0;      // sum_{i<j} X_ij A_ij
  std::int64_t observed_pairs = 0;  // sum_{i<j} X_ij

  ObservedGraph(const AdjacencyMatrix& a, const SamplingMask& x);
  int n() const noexcept { return static_cast<int>(observed_edges.rows()); }
  /// Observed edge density, or 0.5 when nothing is observed.
  double density() const noexcept;
};

/// Sum X.*A / sum X over i<j; 0.5 when the mask is empty.
double observed_density(const AdjacencyMatrix& a, const SamplingMask& x);

void check_same_size(const BinarySymMatrix& a, const BinarySymMatrix& b);

}  // namespace sbmvar
