#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sbmvar {

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 100;
};

struct KMeansResult {
  std::vector<int> assignment;  // values in [0, k)
  Eigen::MatrixXd centers;      // k x d
  double inertia = 0.0;
};

/// Lloyd's algorithm on the rows of `points` with k-means++ seeding; keeps the
/// restart with the lowest within-cluster sum of squares. Empty clusters are
/// re-seeded with the point farthest from its center.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace sbmvar
