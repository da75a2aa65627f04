#include "sbmvar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "sbmvar/errors.hpp"
#include "sbmvar/estimator.hpp"
#include "sbmvar/evaluation.hpp"
#include "sbmvar/io.hpp"
#include "sbmvar/rng.hpp"

namespace sbmvar {
namespace {

using nlohmann::json;

BlockMatrix block3(std::initializer_list<double> values) {
  BlockMatrix q(3, 3);
  auto it = values.begin();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) q(a, b) = *it++;
  return q;
}

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "var") return EstimatorKind::kVar;
  if (s == "oracle") return EstimatorKind::kOracle;
  if (s == "trivial") return EstimatorKind::kTrivial;
  if (s == "naive") return EstimatorKind::kNaive;
  if (s == "svt") return EstimatorKind::kSvt;
  fail(ErrorKind::kParameter, "unknown estimator '" + s + "'");
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "dense") return Protocol::kDense;
  if (s == "sparse") return Protocol::kSparse;
  if (s == "missing") return Protocol::kMissing;
  if (s == "custom") return Protocol::kCustom;
  fail(ErrorKind::kParameter, "unknown protocol '" + s + "'");
}

template <class T>
std::vector<T> as_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

void apply_em(const json& j, EmConfig& em) {
  if (j.contains("max_iter")) em.max_iter = j["max_iter"].get<int>();
  if (j.contains("tol")) em.tol = j["tol"].get<double>();
  if (j.contains("restarts")) em.restarts = j["restarts"].get<int>();
  if (j.contains("damping")) em.damping = j["damping"].get<double>();
  if (j.contains("seed")) em.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("fixed_point_sweeps")) em.fixed_point_sweeps = j["fixed_point_sweeps"].get<int>();
}

struct Task {
  int n;
  double p;
  double rho;
  int seed_index;
};

struct TaskOutput {
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
};

TaskOutput run_task(const ExperimentConfig& cfg, const Task& task) {
  TaskOutput out;
  const std::uint64_t seed = cell_seed(cfg.master_seed, task.n, task.p, task.rho, task.seed_index);
  SbmParams params = cfg.model;
  params.rho = task.rho;
  const GeneratedGraph g = generate_sbm(params, task.n, seed);
  const SamplingMask x = generate_mask(task.n, task.p, seed);

  for (EstimatorKind est : cfg.estimators) {
    auto emit = [&](const std::string& metric, double value) {
      out.rows.push_back({task.n, task.p, task.rho, task.seed_index, est, metric, value});
    };
    try {
      ThetaMatrix theta;
      std::optional<LabelAssignment> labels;
      switch (est) {
        case EstimatorKind::kVar: {
          EmConfig em = cfg.em;
          em.seed = derive_seed(seed, "em");
          const FitResult fit = fit_varem(g.adjacency, x, cfg.k, em);
          VarThetaResult v = var_theta(g.adjacency, x, fit.tau);
          theta = std::move(v.theta);
          labels = std::move(v.labels);
          break;
        }
        case EstimatorKind::kOracle:
          theta = oracle_theta(g.adjacency, x, g.labels);
          break;
        case EstimatorKind::kTrivial:
          theta = trivial_theta(g.adjacency, x);
          break;
        case EstimatorKind::kNaive:
          theta = naive_persistent_theta(g.adjacency, x);
          break;
        case EstimatorKind::kSvt: {
          SvtConfig svt = cfg.svt;
          if (svt.rank <= 0) svt.rank = cfg.k;
          theta = soft_impute(g.adjacency, x, svt);
          break;
        }
      }
      const double err = frobenius_error(theta, g.theta);
      emit("frobenius", err);
      if (cfg.protocol == Protocol::kSparse) emit("normalized", err / (task.rho * task.rho));
      if (labels) emit("misclassified", static_cast<double>(misclassified(*labels, g.labels)));
    } catch (const Error& e) {
      out.failures.push_back({task.n, task.p, task.rho, task.seed_index, est, e.what()});
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

SbmParams model_preset(const std::string& name) {
  SbmParams p;
  if (name == "assortative") {
    p.alpha = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    p.q = block3({0.5, 0.2, 0.2, 0.2, 0.5, 0.2, 0.2, 0.2, 0.5});
  } else if (name == "disassortative") {
    p.alpha = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    p.q = block3({0.2, 0.5, 0.5, 0.5, 0.2, 0.5, 0.5, 0.5, 0.2});
  } else if (name == "mixed") {
    p.alpha = {0.1, 0.3, 0.6};
    p.q = block3({0.1, 0.5, 0.3, 0.5, 0.2, 0.4, 0.3, 0.4, 0.6});
  } else {
    fail(ErrorKind::kParameter, "unknown model preset '" + name + "'");
  }
  return p;
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kDense: return "dense";
    case Protocol::kSparse: return "sparse";
    case Protocol::kMissing: return "missing";
    case Protocol::kCustom: return "custom";
  }
  return "?";
}

std::string to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::kVar: return "var";
    case EstimatorKind::kOracle: return "oracle";
    case EstimatorKind::kTrivial: return "trivial";
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kSvt: return "svt";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  require(!n.empty() && !p.empty() && !rho.empty(), ErrorKind::kParameter,
          "n, p and rho lists must be non-empty");
  require(seeds >= 1, ErrorKind::kParameter, "seeds must be >= 1");
  require(!estimators.empty(), ErrorKind::kParameter, "at least one estimator is required");
  require(k >= 1, ErrorKind::kParameter, "k must be >= 1");
  model.validate();
  for (int v : n) require(v >= std::max(2, k), ErrorKind::kParameter, "every n must be >= max(2, k)");
  for (double v : p) require(v > 0.0 && v <= 1.0, ErrorKind::kParameter, "p must lie in (0, 1]");
  for (double v : rho) {
    SbmParams scaled = model;
    scaled.rho = v;
    scaled.validate();
  }
  em.validate();
  SvtConfig svt_check = svt;
  if (svt_check.rank <= 0) svt_check.rank = k;
  svt_check.validate();
}

ExperimentConfig experiment_preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.svt.rank = 0;
  const auto dense = [&](const std::string& model) {
    cfg.protocol = Protocol::kDense;
    cfg.model_name = model;
    cfg.model = model_preset(model);
    cfg.n = {100, 200, 300, 400, 500};
    cfg.p = {0.5};
    cfg.rho = {1.0};
    cfg.estimators = {EstimatorKind::kVar, EstimatorKind::kOracle, EstimatorKind::kSvt};
  };
  if (name == "dense-assortative" || name == "assortative") {
    dense("assortative");
  } else if (name == "dense-disassortative" || name == "disassortative") {
    dense("disassortative");
  } else if (name == "dense-mixed" || name == "mixed") {
    dense("mixed");
  } else if (name == "sparse-sweep") {
    cfg.protocol = Protocol::kSparse;
    cfg.model_name = "assortative";
    cfg.model = model_preset("assortative");
    cfg.n = {500};
    cfg.p = {0.5};
    cfg.rho = {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    cfg.estimators = {EstimatorKind::kVar, EstimatorKind::kOracle, EstimatorKind::kTrivial,
                      EstimatorKind::kNaive, EstimatorKind::kSvt};
  } else if (name == "missing-sweep") {
    cfg.protocol = Protocol::kMissing;
    cfg.model_name = "assortative";
    cfg.model = model_preset("assortative");
    cfg.n = {500};
    cfg.p = {0.02, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
    cfg.rho = {1.0};
    cfg.estimators = {EstimatorKind::kVar, EstimatorKind::kOracle, EstimatorKind::kTrivial,
                      EstimatorKind::kNaive, EstimatorKind::kSvt};
  } else {
    fail(ErrorKind::kParameter, "unknown experiment preset '" + name + "'");
  }
  return cfg;
}

ExperimentConfig experiment_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    cfg.svt.rank = 0;
    if (j.contains("preset")) cfg = experiment_preset(j["preset"].get<std::string>());
    if (j.contains("protocol")) cfg.protocol = protocol_from_string(j["protocol"].get<std::string>());
    if (j.contains("model")) {
      const json& m = j["model"];
      if (m.is_string()) {
        cfg.model_name = m.get<std::string>();
        cfg.model = model_preset(cfg.model_name);
      } else {
        cfg.model_name = "custom";
        cfg.model.alpha = m.at("alpha").get<std::vector<double>>();
        const auto rows = m.at("q").get<std::vector<std::vector<double>>>();
        const auto k = static_cast<Eigen::Index>(rows.size());
        cfg.model.q.resize(k, k);
        for (Eigen::Index a = 0; a < k; ++a) {
          require(static_cast<Eigen::Index>(rows[a].size()) == k, ErrorKind::kParameter,
                  "model.q must be square");
          for (Eigen::Index b = 0; b < k; ++b) cfg.model.q(a, b) = rows[a][b];
        }
      }
      cfg.k = cfg.model.k();
    } else if (!j.contains("preset")) {
      cfg.model = model_preset(cfg.model_name);
    }
    if (j.contains("n")) cfg.n = as_list<int>(j["n"]);
    if (j.contains("p")) cfg.p = as_list<double>(j["p"]);
    if (j.contains("rho")) cfg.rho = as_list<double>(j["rho"]);
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<int>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& e : j["estimators"]) cfg.estimators.push_back(estimator_from_string(e.get<std::string>()));
    }
    if (j.contains("em")) apply_em(j["em"], cfg.em);
    if (j.contains("svt")) {
      const json& s = j["svt"];
      if (s.contains("rank")) cfg.svt.rank = s["rank"].get<int>();
      if (s.contains("lambda")) cfg.svt.lambda = s["lambda"].get<double>();
      if (s.contains("max_iter")) cfg.svt.max_iter = s["max_iter"].get<int>();
      if (s.contains("tol")) cfg.svt.tol = s["tol"].get<double>();
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParameter, std::string("config: ") + e.what());
  }
}

std::uint64_t cell_seed(std::uint64_t master, int n, double p, double rho, int seed_index) {
  const std::uint64_t cell = splitmix64(static_cast<std::uint64_t>(n)) ^
                             splitmix64(std::bit_cast<std::uint64_t>(p) + 1) ^
                             splitmix64(std::bit_cast<std::uint64_t>(rho) + 2);
  return derive_seed(master, "cell", cell, static_cast<std::uint64_t>(seed_index));
}

double quantile(std::vector<double> values, double prob) {
  require(!values.empty(), ErrorKind::kParameter, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

unsigned worker_count_from_env() {
  if (const char* env = std::getenv("SBMVAR_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepReport run_sweep(const ExperimentConfig& cfg, unsigned workers) {
  cfg.validate();
  std::vector<Task> tasks;
  for (int n : cfg.n)
    for (double p : cfg.p)
      for (double rho : cfg.rho)
        for (int s = 0; s < cfg.seeds; ++s) tasks.push_back({n, p, rho, s});

  std::vector<TaskOutput> outputs(tasks.size());
  if (workers == 0) workers = worker_count_from_env();
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) outputs[i] = run_task(cfg, tasks[i]);
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  SweepReport report;
  for (auto& o : outputs) {
    report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
    report.failures.insert(report.failures.end(), o.failures.begin(), o.failures.end());
  }

  // Group by cell, then estimator, then metric, in first-appearance order.
  struct Key {
    int n;
    double p, rho;
    EstimatorKind est;
    std::string metric;
    bool operator==(const Key&) const = default;
  };
  std::vector<Key> keys;
  std::vector<std::vector<double>> samples;
  for (const auto& r : report.rows) {
    const Key key{r.n, r.p, r.rho, r.estimator, r.metric};
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      samples.emplace_back();
      it = keys.end() - 1;
    }
    samples[static_cast<std::size_t>(it - keys.begin())].push_back(r.value);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& k = keys[i];
    report.summary.push_back({k.n, k.p, k.rho, k.est, k.metric, samples[i].size(),
                              quantile(samples[i], 0.5), quantile(samples[i], 0.25),
                              quantile(samples[i], 0.75)});
  }
  return report;
}

void write_sweep_report(const ExperimentConfig& cfg, const SweepReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  require(!ec, ErrorKind::kIo, "cannot create " + cfg.output.string() + ": " + ec.message());
  const std::string protocol = to_string(cfg.protocol);
  {
    auto out = io::open_output(cfg.output / "long.csv");
    out << "protocol,model,n,p,rho,seed,estimator,metric,value\n";
    for (const auto& r : report.rows)
      out << protocol << ',' << cfg.model_name << ',' << r.n << ',' << fmt(r.p) << ','
          << fmt(r.rho) << ',' << r.seed_index << ',' << to_string(r.estimator) << ','
          << r.metric << ',' << fmt(r.value) << '\n';
  }
  {
    auto out = io::open_output(cfg.output / "summary.csv");
    out << "protocol,model,n,p,rho,estimator,metric,count,median,q25,q75\n";
    for (const auto& s : report.summary)
      out << protocol << ',' << cfg.model_name << ',' << s.n << ',' << fmt(s.p) << ','
          << fmt(s.rho) << ',' << to_string(s.estimator) << ',' << s.metric << ',' << s.count
          << ',' << fmt(s.median) << ',' << fmt(s.q25) << ',' << fmt(s.q75) << '\n';
  }
  {
    auto out = io::open_output(cfg.output / "failures.csv");
    out << "n,p,rho,seed,estimator,message\n";
    for (const auto& f : report.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << f.n << ',' << fmt(f.p) << ',' << fmt(f.rho) << ',' << f.seed_index << ','
          << to_string(f.estimator) << ',' << msg << '\n';
    }
  }
}

FitPredictResult fit_predict(const FitPredictOptions& options) {
  require(!options.k_range.empty(), ErrorKind::kParameter, "k or a k range is required");
  const io::EdgeList edges = io::read_edge_list(options.graph, false, options.n);
  const io::EdgeList observed = io::read_edge_list(options.mask, true, options.n);
  const int n = options.n.value_or(std::max(edges.n, observed.n));
  require(n >= 2, ErrorKind::kData, "graph needs at least two nodes");
  for (int k : options.k_range)
    require(k >= 1 && k <= n, ErrorKind::kParameter,
            "k = " + std::to_string(k) + " outside [1, n = " + std::to_string(n) + "]");
  const AdjacencyMatrix a = io::to_adjacency(edges, n);
  const SamplingMask x = io::to_mask(observed, n);

  FitPredictResult r;
  if (options.k_range.size() == 1) {
    r.fit = fit_varem(a, x, options.k_range.front(), options.em);
    r.k_hat = options.k_range.front();
  } else {
    SelectionResult sel = select_k(a, x, options.k_range, options.em);
    r.k_hat = sel.k_hat;
    r.scores = sel.scores;
    r.fit = sel.best_fit();
  }
  VarThetaResult v = var_theta(a, x, r.fit.tau);
  r.labels = std::move(v.labels);
  r.q = std::move(v.q);
  r.theta = std::move(v.theta);

  json meta;
  meta["n"] = n;
  meta["k_hat"] = r.k_hat;
  meta["observed_pairs"] = x.count_pairs();
  meta["alpha"] = r.fit.alpha;
  auto matrix_json = [](const BlockMatrix& q) {
    json rows = json::array();
    for (Eigen::Index a = 0; a < q.rows(); ++a) {
      std::vector<double> row(static_cast<std::size_t>(q.cols()));
      for (Eigen::Index b = 0; b < q.cols(); ++b) row[b] = q(a, b);
      rows.push_back(row);
    }
    return rows;
  };
  meta["q"] = matrix_json(r.q);
  meta["q_variational"] = matrix_json(r.fit.q);
  meta["elbo_trace"] = r.fit.elbo_trace;
  meta["iterations"] = r.fit.iterations;
  meta["converged"] = r.fit.converged;
  meta["restart_index"] = r.fit.restart_index;
  meta["diagnostics"] = r.fit.diagnostics;
  json scores = json::array();
  for (const auto& s : r.scores) scores.push_back({{"k", s.k}, {"icl", s.score}, {"converged", s.converged}});
  meta["icl_scores"] = scores;
  r.metadata = meta;

  std::error_code ec;
  std::filesystem::create_directories(options.output, ec);
  require(!ec, ErrorKind::kIo, "cannot create " + options.output.string() + ": " + ec.message());
  {
    auto out = io::open_output(options.output / "theta.csv");
    io::write_matrix_csv(out, r.theta.values);
  }
  {
    auto out = io::open_output(options.output / "labels.csv");
    io::write_labels_csv(out, r.labels);
  }
  {
    auto out = io::open_output(options.output / "metadata.json");
    out << meta.dump(2) << '\n';
  }
  return r;
}

}  // namespace sbmvar
