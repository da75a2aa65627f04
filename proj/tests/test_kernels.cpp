#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sbmvar/kernels.hpp"

using namespace sbmvar;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

void check_table(const kernels::KernelTable& t) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 100u, 1001u}) {
    const auto a = random_vector(n, rng), b = random_vector(n, rng);
    std::vector<double> w = random_vector(n, rng);
    for (double& x : w) x = std::abs(x);
    double mag = 0, dd = 0, wd = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mag += std::abs(a[i] * b[i]);
      dd += (a[i] - b[i]) * (a[i] - b[i]);
      wd += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
    }
    const double tol = 1e-13 * (1.0 + mag + dd + wd);
    CHECK(std::abs(t.dot(a.data(), b.data(), n) - naive_dot(a, b)) <= tol);
    CHECK(std::abs(t.squared_distance(a.data(), b.data(), n) - dd) <= tol);
    CHECK(std::abs(t.weighted_squared_distance(a.data(), b.data(), w.data(), n) - wd) <= tol);
  }
}

}  // namespace

TEST_CASE("scalar kernels match long-double reference") { check_table(kernels::scalar_table()); }

TEST_CASE("simd kernels agree with scalar kernels") {
  const kernels::KernelTable* simd[] = {kernels::avx2_table(), kernels::neon_table()};
  int found = 0;
  for (const auto* t : simd) {
    if (!t) continue;
    ++found;
    INFO(t->name);
    check_table(*t);
  }
  MESSAGE("simd tables available: " << found);
}

TEST_CASE("set_active swaps the dispatch table") {
  const auto& before = kernels::active();
  const auto& prev = kernels::set_active(kernels::scalar_table());
  CHECK(&prev == &before);
  CHECK(kernels::active().name == kernels::scalar_table().name);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(kernels::dot(a, b) == 32.0);
  CHECK(kernels::squared_distance(a, b) == 27.0);
  std::vector<double> w{1, 0, 2};
  CHECK(kernels::weighted_squared_distance(a, b, w) == 27.0);
  kernels::set_active(before);
  CHECK(&kernels::active() == &before);
}
