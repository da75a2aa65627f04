#include "sbmvar/kmeans.hpp"

#include <limits>

#include "sbmvar/errors.hpp"
#include "sbmvar/rng.hpp"

namespace sbmvar {
namespace {

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(n)));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.row(i) - centers.row(c - 1)).squaredNorm());
      total += d2[i];
    }
    // All points coincide with chosen centers: fall back to a uniform pick.
    const Eigen::Index pick = total > 0.0 ? static_cast<Eigen::Index>(rng.categorical(d2))
                                          : static_cast<Eigen::Index>(rng.below(n));
    centers.row(c) = points.row(pick);
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, int max_iter) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult r;
  r.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[i] = best_d;
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.assignment[i]) += points.row(i);
      ++sizes[r.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        centers.row(c) = sums.row(c) / sizes[c];
        continue;
      }
      Eigen::Index far = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (dist[i] > dist[far]) far = i;
      centers.row(c) = points.row(far);
      dist[far] = 0.0;
      changed = true;
    }
    if (!changed) break;
  }
  r.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    r.inertia += (points.row(i) - centers.row(r.assignment[i])).squaredNorm();
  r.centers = std::move(centers);
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
  require(k >= 1 && k <= points.rows(), ErrorKind::kParameter, "k-means needs 1 <= k <= n");
  require(options.restarts >= 1 && options.max_iter >= 1, ErrorKind::kParameter,
          "k-means needs restarts >= 1 and max_iter >= 1");
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    KMeansResult candidate = lloyd(points, seed_plus_plus(points, k, rng), options.max_iter);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

}  // namespace sbmvar
