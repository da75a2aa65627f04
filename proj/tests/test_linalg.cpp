#include <doctest.h>

#include <random>

#include "sbmvar/kmeans.hpp"
#include "sbmvar/linalg.hpp"

using namespace sbmvar;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = g(rng);
  return m;
}

}  // namespace

TEST_CASE("top eigenpairs agree with the full symmetric solver") {
  std::mt19937_64 rng(1);
  for (int n : {1, 2, 3, 7, 20, 61}) {
    const auto m = random_symmetric(n, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m);
    std::vector<double> ref(full.eigenvalues().data(), full.eigenvalues().data() + n);
    std::sort(ref.begin(), ref.end(), [](double u, double v) { return std::abs(u) > std::abs(v); });
    for (int r : {1, 2, n / 2, n}) {
      if (r < 1 || r > n) continue;
      INFO("n=" << n << " r=" << r);
      const auto pairs = top_abs_eigenpairs(m, r);
      REQUIRE(pairs.values.size() == r);
      for (int c = 0; c < r; ++c) {
        CHECK(pairs.values(c) == doctest::Approx(ref[c]).epsilon(1e-10));
        const Eigen::VectorXd v = pairs.vectors.col(c);
        CHECK((m * v - pairs.values(c) * v).norm() < 1e-9 * (1 + m.norm()));
      }
      const Eigen::MatrixXd gram = pairs.vectors.transpose() * pairs.vectors;
      CHECK((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("kmeans recovers well separated clusters") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.05);
  Eigen::MatrixXd pts(60, 2);
  for (int i = 0; i < 60; ++i) {
    const int c = i / 20;
    pts(i, 0) = c * 3.0 + g(rng);
    pts(i, 1) = (c == 1 ? 2.0 : 0.0) + g(rng);
  }
  const auto res = kmeans(pts, 3, 9);
  for (int i = 0; i < 60; ++i) CHECK(res.assignment[i] == res.assignment[(i / 20) * 20]);
  CHECK(res.assignment[0] != res.assignment[20]);
  CHECK(res.assignment[20] != res.assignment[40]);
  CHECK(res.assignment[0] != res.assignment[40]);
  const auto again = kmeans(pts, 3, 9);
  CHECK(again.assignment == res.assignment);
}
