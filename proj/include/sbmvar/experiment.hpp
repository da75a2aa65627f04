#pragma once

// Monte-Carlo sweeps over (n, p, rho) grids and the fit/predict workflow.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbmvar/baseline_svt.hpp"
#include "sbmvar/modelselect.hpp"
#include "sbmvar/netcore.hpp"
#include "sbmvar/varem.hpp"

namespace sbmvar {

/// "assortative", "disassortative" or "mixed" (three-community models).
SbmParams model_preset(const std::string& name);

enum class Protocol { kDense, kSparse, kMissing, kCustom };
enum class EstimatorKind { kVar, kOracle, kTrivial, kNaive, kSvt };

std::string to_string(Protocol p);
std::string to_string(EstimatorKind e);

struct ExperimentConfig {
  Protocol protocol = Protocol::kDense;
  std::string model_name = "assortative";
  SbmParams model;  // rho is taken from the grid, not from here
  std::vector<int> n{300};
  std::vector<double> p{0.5};
  std::vector<double> rho{1.0};
  int k = 3;
  int seeds = 20;
  std::vector<EstimatorKind> estimators{EstimatorKind::kVar, EstimatorKind::kOracle,
                                        EstimatorKind::kSvt};
  EmConfig em;
  SvtConfig svt;  // rank <= 0 in JSON means "use k"
  std::filesystem::path output = "sweep-out";
  std::uint64_t master_seed = 1;

  void validate() const;
};

/// dense-assortative, dense-disassortative, dense-mixed, sparse-sweep, missing-sweep.
ExperimentConfig experiment_preset(const std::string& name);

/// Starts from `preset` (when present) and overrides with the remaining keys.
ExperimentConfig experiment_from_json(const nlohmann::json& j);

struct SweepRow {
  int n;
  double p;
  double rho;
  int seed_index;
  EstimatorKind estimator;
  std::string metric;
  double value;
};

struct SummaryRow {
  int n;
  double p;
  double rho;
  EstimatorKind estimator;
  std::string metric;
  std::size_t count;
  double median;
  double q25;
  double q75;
};

struct SweepFailure {
  int n;
  double p;
  double rho;
  int seed_index;
  EstimatorKind estimator;
  std::string message;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // (cell, seed, estimator, metric) order
  std::vector<SummaryRow> summary;
  std::vector<SweepFailure> failures;
};

/// Seed of replicate `seed_index` in cell (n, p, rho); independent of the grid layout.
std::uint64_t cell_seed(std::uint64_t master, int n, double p, double rho, int seed_index);

/// Runs every (cell, replicate) on `workers` threads (SBMVAR_WORKERS or the
/// hardware concurrency when 0). Output order does not depend on scheduling.
SweepReport run_sweep(const ExperimentConfig& cfg, unsigned workers = 0);

/// Writes long.csv, summary.csv and failures.csv (when non-empty) into cfg.output.
void write_sweep_report(const ExperimentConfig& cfg, const SweepReport& report);

/// Type-7 (linear interpolation) sample quantile; `values` need not be sorted.
double quantile(std::vector<double> values, double prob);

struct FitPredictOptions {
  std::filesystem::path graph;
  std::filesystem::path mask;
  std::optional<int> n;
  std::vector<int> k_range;  // a single entry fits that k directly
  EmConfig em;
  std::filesystem::path output;
};

struct FitPredictResult {
  int k_hat = 0;
  LabelAssignment labels;
  BlockMatrix q;
  ThetaMatrix theta;
  FitResult fit;
  std::vector<KScore> scores;  // empty when a single k was requested
  nlohmann::json metadata;
};

/// Loads the edge list and mask, fits (selecting k when a range is given) and
/// writes theta.csv, labels.csv and metadata.json to options.output.
FitPredictResult fit_predict(const FitPredictOptions& options);

unsigned worker_count_from_env();

}  // namespace sbmvar
