#include "sbmvar/netcore.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "sbmvar/errors.hpp"
#include "sbmvar/rng.hpp"

namespace sbmvar {

BinarySymMatrix::BinarySymMatrix(int n) : n_(n) {
  require(n >= 0, ErrorKind::kParameter, "matrix size must be non-negative");
  bits_.assign(static_cast<std::size_t>(n) * n, 0);
}

void BinarySymMatrix::set(int i, int j, bool value) {
  require(i != j, ErrorKind::kConsistency, "diagonal entries are fixed to 0");
  require(i >= 0 && j >= 0 && i < n_ && j < n_, ErrorKind::kConsistency,
          "index out of range");
  const auto v = static_cast<std::uint8_t>(value);
  bits_[static_cast<std::size_t>(i) * n_ + j] = v;
  bits_[static_cast<std::size_t>(j) * n_ + i] = v;
}

std::int64_t BinarySymMatrix::count_pairs() const noexcept {
  std::int64_t c = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) c += (*this)(i, j);
  return c;
}

void BinarySymMatrix::validate() const {
  for (int i = 0; i < n_; ++i) {
    require(!(*this)(i, i), ErrorKind::kConsistency, "non-zero diagonal");
    for (int j = i + 1; j < n_; ++j)
      require((*this)(i, j) == (*this)(j, i), ErrorKind::kConsistency, "matrix not symmetric");
  }
}

SamplingMask SamplingMask::full(int n) {
  SamplingMask m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.set(i, j, true);
  return m;
}

void validate_block_matrix(const BlockMatrix& q, double lo, double hi, bool open_interval) {
  require(q.rows() == q.cols() && q.rows() > 0, ErrorKind::kParameter,
          "connectivity matrix must be square and non-empty");
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (Eigen::Index b = 0; b < q.cols(); ++b) {
      const double v = q(a, b);
      require(v == q(b, a), ErrorKind::kParameter, "connectivity matrix must be symmetric");
      const bool inside = open_interval ? (v > lo && v < hi) : (v >= lo && v <= hi);
      if (!inside) {
        std::ostringstream msg;
        msg << "connectivity entry (" << a + 1 << "," << b + 1 << ") = " << v << " outside "
            << (open_interval ? "(" : "[") << lo << ", " << hi << (open_interval ? ")" : "]");
        fail(ErrorKind::kParameter, msg.str());
      }
    }
  }
}

BlockMatrix SbmParams::effective_q() const { return rho ? BlockMatrix(*rho * q) : q; }

void SbmParams::validate() const {
  require(!alpha.empty(), ErrorKind::kParameter, "alpha must be non-empty");
  double total = 0.0;
  for (double a : alpha) {
    require(a >= 0.0 && std::isfinite(a), ErrorKind::kParameter,
            "alpha entries must be non-negative");
    total += a;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorKind::kParameter, "alpha must sum to 1");
  require(q.rows() == k(), ErrorKind::kParameter, "q must be k x k with k = |alpha|");
  validate_block_matrix(q, 0.0, 1.0, true);
  if (rho) {
    require(*rho > 0.0 && *rho <= 1.0, ErrorKind::kParameter, "rho must lie in (0, 1]");
    validate_block_matrix(effective_q(), 0.0, 1.0, true);
  }
  if (bounds) {
    const auto [gamma, upper] = *bounds;
    require(gamma > 0.0 && gamma <= upper && upper < 1.0, ErrorKind::kParameter,
            "bounds must satisfy 0 < gamma <= rho_bar < 1");
  }
}

void LabelAssignment::validate() const {
  require(k >= 1, ErrorKind::kConsistency, "label assignment needs k >= 1");
  for (int v : z)
    require(v >= 0 && v < k, ErrorKind::kConsistency,
            "label " + std::to_string(v + 1) + " outside [1, " + std::to_string(k) + "]");
}

std::vector<int> LabelAssignment::community_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int v : z) ++sizes[static_cast<std::size_t>(v)];
  return sizes;
}

void ThetaMatrix::validate(double tol) const {
  require(values.rows() == values.cols(), ErrorKind::kConsistency, "theta must be square");
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    require(values(i, i) == 0.0, ErrorKind::kConsistency, "theta diagonal must be 0");
    for (Eigen::Index j = i + 1; j < values.cols(); ++j) {
      const double v = values(i, j);
      require(std::abs(v - values(j, i)) <= tol, ErrorKind::kConsistency,
              "theta must be symmetric");
      require(v >= 0.0 && v <= 1.0, ErrorKind::kConsistency, "theta entries must lie in [0,1]");
    }
  }
}

GeneratedGraph generate_sbm(const SbmParams& params, int n, std::uint64_t seed) {
  params.validate();
  require(n >= 2, ErrorKind::kParameter, "generate_sbm needs n >= 2");
  const int k = params.k();
  const BlockMatrix q = params.effective_q();

  LabelAssignment labels{k, std::vector<int>(static_cast<std::size_t>(n))};
  Rng label_rng(seed, "labels");
  for (int& v : labels.z) v = static_cast<int>(label_rng.categorical(params.alpha));

  AdjacencyMatrix a(n);
  Rng edge_rng(seed, "edges");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge_rng.bernoulli(q(labels.z[i], labels.z[j]))) a.set(i, j, true);

  ThetaMatrix theta = theta_from(labels, q);
  return {std::move(labels), std::move(a), std::move(theta)};
}

SamplingMask generate_mask(int n, double p, std::uint64_t seed) {
  require(p > 0.0 && p <= 1.0, ErrorKind::kParameter, "sampling rate must lie in (0, 1]");
  require(n >= 0, ErrorKind::kParameter, "mask size must be non-negative");
  SamplingMask x(n);
  Rng rng(seed, "mask");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) x.set(i, j, true);
  return x;
}

BlockMatrix scale_sparsity(const BlockMatrix& q0, double rho) {
  BlockMatrix scaled = rho * q0;
  for (Eigen::Index i = 0; i < scaled.size(); ++i) {
    const double v = scaled.data()[i];
    require(v > 0.0 && v < 1.0, ErrorKind::kRange,
            "rho * q0 leaves (0, 1): entry " + std::to_string(v));
  }
  return scaled;
}

ThetaMatrix theta_from(const LabelAssignment& z, const BlockMatrix& q) {
  z.validate();
  require(q.rows() >= z.k && q.cols() == q.rows(), ErrorKind::kConsistency,
          "connectivity matrix smaller than label range");
  validate_block_matrix(q, 0.0, 1.0, false);
  const int n = z.n();
  Eigen::MatrixXd t(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) t(i, j) = i == j ? 0.0 : q(z.z[i], z.z[j]);
  return ThetaMatrix(std::move(t));
}

void check_same_size(const BinarySymMatrix& a, const BinarySymMatrix& b) {
  require(a.n() == b.n(), ErrorKind::kConsistency,
          "size mismatch: " + std::to_string(a.n()) + " vs " + std::to_string(b.n()));
}

ObservedGraph::ObservedGraph(const AdjacencyMatrix& a, const SamplingMask& x) {
  check_same_size(a, x);
  const int n = a.n();
  observed_edges = Eigen::MatrixXd::Zero(n, n);
  observed_non_edges = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j || !x(i, j)) continue;
      if (a(i, j))
        observed_edges(i, j) = 1.0;
      else
        observed_non_edges(i, j) = 1.0;
      if (i < j) {
        ++observed_pairs;
        edge_pairs += a(i, j);
      }
    }
  }
}

double ObservedGraph::density() const noexcept {
  return observed_pairs == 0 ? 0.5
                             : static_cast<double>(edge_pairs) / static_cast<double>(observed_pairs);
}

double observed_density(const AdjacencyMatrix& a, const SamplingMask& x) {
  check_same_size(a, x);
  std::int64_t edges = 0, pairs = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j)
      if (x(i, j)) {
        ++pairs;
        edges += a(i, j);
      }
  return pairs == 0 ? 0.5 : static_cast<double>(edges) / static_cast<double>(pairs);
}

}  // namespace sbmvar
