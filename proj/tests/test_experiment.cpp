#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "sbmvar/errors.hpp"
#include "sbmvar/experiment.hpp"

using namespace sbmvar;

namespace {

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t lines = 0;
  for (std::string s; std::getline(in, s);) ++lines;
  return lines;
}

}  // namespace

TEST_CASE("quantile uses linear interpolation") {
  CHECK(quantile({3.0}, 0.25) == 3.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1, 2, 3, 4, 5}, 0.75) == 4.0);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("model presets") {
  const auto mixed = model_preset("mixed");
  CHECK(mixed.alpha == std::vector<double>{0.1, 0.3, 0.6});
  CHECK(mixed.q(0, 1) == 0.5);
  CHECK(mixed.q(2, 2) == 0.6);
  const auto assort = model_preset("assortative");
  CHECK(assort.q(0, 0) == 0.5);
  CHECK(assort.q(0, 1) == 0.2);
  const auto dis = model_preset("disassortative");
  CHECK(dis.q(1, 1) == 0.2);
  CHECK(dis.q(1, 2) == 0.5);
  CHECK_THROWS_AS(model_preset("nope"), Error);
  for (const char* name : {"dense-assortative", "dense-disassortative", "dense-mixed", "sparse-sweep",
                           "missing-sweep"})
    CHECK_NOTHROW(experiment_preset(name).validate());
}

TEST_CASE("cell seeds differ across cells and seed indices") {
  std::set<std::uint64_t> seen;
  for (int n : {100, 200})
    for (double p : {0.25, 0.5})
      for (double rho : {0.1, 1.0})
        for (int s = 0; s < 5; ++s) seen.insert(cell_seed(1, n, p, rho, s));
  CHECK(seen.size() == 40);
  CHECK(cell_seed(1, 100, 0.5, 1.0, 0) != cell_seed(2, 100, 0.5, 1.0, 0));
}

TEST_CASE("sweep row and summary counts") {
  ExperimentConfig cfg = experiment_preset("dense-assortative");
  cfg.n = {100, 200, 300};
  cfg.seeds = 20;
  cfg.estimators = {EstimatorKind::kVar, EstimatorKind::kOracle, EstimatorKind::kTrivial};
  const auto report = run_sweep(cfg, 1);
  CHECK(report.failures.empty());
  // var reports frobenius and misclassified, the others frobenius only
  CHECK(report.rows.size() == 3 * 20 * 4);
  CHECK(report.summary.size() == 3 * 4);
  for (const auto& s : report.summary) {
    CHECK(s.count == 20);
    CHECK(s.q25 <= s.median);
    CHECK(s.median <= s.q75);
  }
}

TEST_CASE("single-seed summaries collapse to the value") {
  ExperimentConfig cfg = experiment_preset("sparse-sweep");
  cfg.n = {60};
  cfg.rho = {0.5};
  cfg.seeds = 1;
  const auto report = run_sweep(cfg, 1);
  CHECK(report.failures.empty());
  for (const auto& s : report.summary) {
    CHECK(s.median == s.q25);
    CHECK(s.median == s.q75);
  }
  bool normalized = false;
  for (const auto& r : report.rows) normalized |= r.metric == "normalized";
  CHECK(normalized);
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
  ExperimentConfig cfg = experiment_preset("dense-mixed");
  cfg.n = {60, 90};
  cfg.seeds = 4;
  const auto one = run_sweep(cfg, 1);
  const auto three = run_sweep(cfg, 3);
  REQUIRE(one.rows.size() == three.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].n == three.rows[i].n);
    CHECK(one.rows[i].seed_index == three.rows[i].seed_index);
    CHECK(one.rows[i].metric == three.rows[i].metric);
    CHECK(one.rows[i].value == three.rows[i].value);
  }
}

TEST_CASE("sweep report files") {
  const auto dir = std::filesystem::temp_directory_path() / "sbmvar-test-sweep";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg = experiment_preset("dense-assortative");
  cfg.n = {50};
  cfg.seeds = 3;
  cfg.output = dir;
  const auto report = run_sweep(cfg, 1);
  write_sweep_report(cfg, report);
  CHECK(count_lines(dir / "long.csv") == report.rows.size() + 1);
  CHECK(count_lines(dir / "summary.csv") == report.summary.size() + 1);
  CHECK(std::filesystem::exists(dir / "failures.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("json configs") {
  const auto j = nlohmann::json::parse(R"({
    "preset": "dense-assortative", "n": [80], "seeds": 2, "estimators": ["var", "trivial"],
    "em": {"restarts": 2, "tol": 1e-5}, "svt": {"rank": 0}
  })");
  const auto cfg = experiment_from_json(j);
  CHECK(cfg.n == std::vector<int>{80});
  CHECK(cfg.seeds == 2);
  CHECK(cfg.em.restarts == 2);
  CHECK(cfg.estimators.size() == 2);
  const auto custom = experiment_from_json(nlohmann::json::parse(
      R"({"model": {"alpha": [0.5, 0.5], "q": [[0.6, 0.1], [0.1, 0.6]]}, "k": 2})"));
  CHECK(custom.model.k() == 2);
  CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"estimators": ["bogus"]})")), Error);
  CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"seeds": 0})")), Error);
}
