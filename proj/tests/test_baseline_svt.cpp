#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sbmvar/baseline_svt.hpp"
#include "sbmvar/errors.hpp"
#include "sbmvar/experiment.hpp"

using namespace sbmvar;

namespace {

double relative_offdiag_error(const ThetaMatrix& t, const AdjacencyMatrix& a) {
  double num = 0, den = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) {
      if (i == j) continue;
      const double v = a(i, j) ? 1.0 : 0.0;
      num += (t(i, j) - v) * (t(i, j) - v);
      den += v * v;
    }
  return std::sqrt(num / den);
}

void check_valid_output(const ThetaMatrix& t) { CHECK_NOTHROW(t.validate(0.0)); }

}  // namespace

TEST_CASE("full rank with no penalty reproduces A") {
  std::mt19937_64 rng(1);
  const auto a = oracle::random_binary<AdjacencyMatrix>(12, 0.4, rng);
  SvtConfig cfg;
  cfg.rank = 12;
  const auto t = soft_impute(a, SamplingMask::full(12), cfg);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (i != j) CHECK(t(i, j) == doctest::Approx(a(i, j) ? 1.0 : 0.0).epsilon(1e-6));
}

TEST_CASE("rank one reproduces a constant matrix") {
  // the all-ones pattern off the diagonal, fully observed
  AdjacencyMatrix a(10);
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) a.set(i, j, true);
  SvtConfig cfg;
  cfg.rank = 1;
  const auto t = soft_impute(a, SamplingMask::full(10), cfg);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (i != j) CHECK(t(i, j) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rank-2 planted patterns are completed from half the entries") {
  const int n = 200;
  const auto x = generate_mask(n, 0.5, 7);
  SvtConfig cfg;
  cfg.rank = 2;
  cfg.max_iter = 500;
  SUBCASE("two cliques") {
    AdjacencyMatrix a(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if ((i < n / 2) == (j < n / 2)) a.set(i, j, true);
    CHECK(relative_offdiag_error(soft_impute(a, x, cfg), a) < 0.05);
  }
  SUBCASE("core and periphery") {
    AdjacencyMatrix a(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (i < n / 3) a.set(i, j, true);
    CHECK(relative_offdiag_error(soft_impute(a, x, cfg), a) < 0.05);
  }
}

TEST_CASE("output is valid and the objective never increases") {
  for (const char* name : {"assortative", "mixed"}) {
    for (double lambda : {0.0, 2.0}) {
      const auto g = generate_sbm(model_preset(name), 150, 3);
      const auto x = generate_mask(150, 0.4, 3);
      SvtConfig cfg;
      cfg.rank = 3;
      cfg.lambda = lambda;
      const auto res = soft_impute_detailed(g.adjacency, x, cfg);
      check_valid_output(res.theta);
      REQUIRE(!res.objective_trace.empty());
      for (std::size_t t = 1; t < res.objective_trace.size(); ++t)
        CHECK(res.objective_trace[t] <= res.objective_trace[t - 1] + 1e-8);
    }
  }
}

TEST_CASE("config validation") {
  SvtConfig cfg;
  cfg.rank = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SvtConfig{};
  cfg.lambda = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
