#include "sbmvar/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "sbmvar/estimator.hpp"
#include "sbmvar/evaluation.hpp"
#include "sbmvar/experiment.hpp"
#include "sbmvar/io.hpp"

namespace sbmvar::cli {
namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kParameter, "cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParameter, path + ": " + e.what());
  }
}

std::vector<int> parse_k_range(const std::string& spec) {
  std::vector<int> ks;
  try {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      ks.push_back(std::stoi(spec));
    } else {
      const int lo = std::stoi(spec.substr(0, colon));
      const int hi = std::stoi(spec.substr(colon + 1));
      require(lo <= hi, ErrorKind::kParameter, "k range '" + spec + "' is empty");
      for (int k = lo; k <= hi; ++k) ks.push_back(k);
    }
  } catch (const std::logic_error&) {
    fail(ErrorKind::kParameter, "cannot parse k range '" + spec + "' (expected K or LO:HI)");
  }
  return ks;
}

EmConfig em_from(const std::string& config_path, std::optional<std::uint64_t> seed) {
  EmConfig em;
  if (!config_path.empty()) {
    const json j = load_json(config_path);
    const json& section = j.contains("em") ? j["em"] : j;
    try {
      if (section.contains("max_iter")) em.max_iter = section["max_iter"].get<int>();
      if (section.contains("tol")) em.tol = section["tol"].get<double>();
      if (section.contains("restarts")) em.restarts = section["restarts"].get<int>();
      if (section.contains("damping")) em.damping = section["damping"].get<double>();
      if (section.contains("seed")) em.seed = section["seed"].get<std::uint64_t>();
      if (section.contains("fixed_point_sweeps"))
        em.fixed_point_sweeps = section["fixed_point_sweeps"].get<int>();
    } catch (const json::exception& e) {
      fail(ErrorKind::kParameter, config_path + ": " + e.what());
    }
  }
  if (seed) em.seed = *seed;
  em.validate();
  return em;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParameter:
    case ErrorKind::kRange:
    case ErrorKind::kCapacity:
    case ErrorKind::kIo:
      return kExitConfig;
    case ErrorKind::kData:
    case ErrorKind::kConsistency:
    case ErrorKind::kDegenerate:
      return kExitData;
    case ErrorKind::kNumerical:
      return kExitNumerical;
  }
  return kExitConfig;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Stochastic block model estimation from partially observed graphs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Simulate an SBM graph and an observation mask");
  std::string gen_model = "assortative", gen_config, gen_out = "generated";
  int gen_n = 300;
  double gen_p = 1.0, gen_rho = 1.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--model", gen_model, "Model preset: assortative, disassortative, mixed");
  gen->add_option("--config", gen_config, "JSON file with a \"model\" section {alpha, q}");
  gen->add_option("-n,--n", gen_n, "Number of nodes");
  gen->add_option("-p,--p", gen_p, "Sampling rate");
  gen->add_option("--rho", gen_rho, "Sparsity multiplier");
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("-o,--out", gen_out, "Output directory");

  // fit / predict
  std::string fit_graph, fit_mask, fit_k = "", fit_config, fit_out = "fit-out";
  std::optional<int> fit_n;
  std::optional<std::uint64_t> fit_seed;
  auto add_fit_options = [&](CLI::App* sub) {
    sub->add_option("-g,--graph", fit_graph, "Edge list (i<TAB>j, 1-based)")->required();
    sub->add_option("-m,--mask", fit_mask, "Observed pairs, or a single '*' line")->required();
    sub->add_option("-k,--k", fit_k, "Number of communities K, or a range LO:HI")->required();
    sub->add_option("-n,--n", fit_n, "Node count (default: largest id)");
    sub->add_option("--config", fit_config, "JSON file with an \"em\" section");
    sub->add_option("--seed", fit_seed, "Master seed");
    sub->add_option("-o,--out", fit_out, "Output directory");
  };
  auto* fit = app.add_subcommand("fit", "Fit the variational estimator and write theta, labels, metadata");
  add_fit_options(fit);
  auto* predict = app.add_subcommand("predict", "Alias of fit");
  add_fit_options(predict);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over an (n, p, rho) grid");
  std::string sweep_config, sweep_preset, sweep_out;
  std::optional<int> sweep_seeds;
  std::optional<std::uint64_t> sweep_seed;
  bool paper_seeds = false;
  unsigned sweep_workers = 0;
  sweep->add_option("--config", sweep_config, "JSON experiment config");
  sweep->add_option("--preset", sweep_preset,
                    "dense-assortative, dense-disassortative, dense-mixed, sparse-sweep, missing-sweep");
  sweep->add_option("--seeds", sweep_seeds, "Replicates per cell");
  sweep->add_flag("--paper-seeds", paper_seeds, "Use 100 replicates per cell");
  sweep->add_option("--seed", sweep_seed, "Master seed");
  sweep->add_option("--workers", sweep_workers, "Worker threads (default: SBMVAR_WORKERS or all cores)");
  sweep->add_option("-o,--out", sweep_out, "Output directory");

  // select-k
  auto* sel = app.add_subcommand("select-k", "Choose the number of communities by ICL");
  std::string sel_graph, sel_mask, sel_range = "1:6", sel_config, sel_out = "icl.csv";
  std::optional<int> sel_n;
  std::optional<std::uint64_t> sel_seed;
  sel->add_option("-g,--graph", sel_graph, "Edge list")->required();
  sel->add_option("-m,--mask", sel_mask, "Observed pairs, or '*'")->required();
  sel->add_option("-k,--k-range", sel_range, "LO:HI");
  sel->add_option("-n,--n", sel_n, "Node count");
  sel->add_option("--config", sel_config, "JSON file with an \"em\" section");
  sel->add_option("--seed", sel_seed, "Master seed");
  sel->add_option("-o,--out", sel_out, "Score table CSV (k,score,converged)");

  // eval
  auto* ev = app.add_subcommand("eval", "Precision-recall and error tables for a theta CSV");
  std::string ev_theta, ev_graph, ev_eval_mask, ev_train_mask, ev_truth, ev_out = "eval-out",
                                                                        ev_name = "theta";
  ev->add_option("--theta", ev_theta, "Estimated theta CSV")->required();
  ev->add_option("-g,--graph", ev_graph, "Test edge list")->required();
  ev->add_option("--eval-mask", ev_eval_mask, "Pairs to score (mask format); default: all pairs");
  ev->add_option("--train-mask", ev_train_mask, "Training mask; enables the held-out error");
  ev->add_option("--truth", ev_truth, "True theta CSV; enables the Frobenius error");
  ev->add_option("--name", ev_name, "Estimator name for the error table");
  ev->add_option("-o,--out", ev_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      SbmParams params;
      if (!gen_config.empty()) {
        ExperimentConfig cfg = experiment_from_json(load_json(gen_config));
        params = cfg.model;
      } else {
        params = model_preset(gen_model);
      }
      params.rho = gen_rho;
      const GeneratedGraph g = generate_sbm(params, gen_n, gen_seed);
      const SamplingMask x = generate_mask(gen_n, gen_p, gen_seed);
      ensure_dir(gen_out);
      const std::filesystem::path dir = gen_out;
      { auto out = io::open_output(dir / "graph.tsv"); io::write_edge_list(out, g.adjacency); }
      { auto out = io::open_output(dir / "mask.tsv"); io::write_mask(out, x); }
      { auto out = io::open_output(dir / "labels.csv"); io::write_labels_csv(out, g.labels); }
      { auto out = io::open_output(dir / "theta.csv"); io::write_matrix_csv(out, g.theta.values); }
      std::cout << "wrote " << gen_n << "-node graph (" << g.adjacency.count_pairs()
                << " edges, " << x.count_pairs() << " observed pairs) to " << dir.string() << '\n';
      return kExitOk;
    }

    if (fit->parsed() || predict->parsed()) {
      FitPredictOptions opt;
      opt.graph = fit_graph;
      opt.mask = fit_mask;
      opt.n = fit_n;
      opt.k_range = parse_k_range(fit_k);
      opt.em = em_from(fit_config, fit_seed);
      opt.output = fit_out;
      const FitPredictResult r = fit_predict(opt);
      std::cout << "k = " << r.k_hat << ", ELBO = " << r.fit.final_elbo() << ", "
                << r.fit.iterations << " iterations" << (r.fit.converged ? "" : " (not converged)")
                << "; outputs in " << opt.output.string() << '\n';
      return kExitOk;
    }

    if (sweep->parsed()) {
      require(!sweep_config.empty() || !sweep_preset.empty(), ErrorKind::kParameter,
              "sweep needs --config or --preset");
      ExperimentConfig cfg;
      if (!sweep_config.empty()) {
        json j = load_json(sweep_config);
        if (!sweep_preset.empty()) j["preset"] = sweep_preset;
        cfg = experiment_from_json(j);
      } else {
        cfg = experiment_preset(sweep_preset);
      }
      if (paper_seeds) cfg.seeds = 100;
      if (sweep_seeds) cfg.seeds = *sweep_seeds;
      if (sweep_seed) cfg.master_seed = *sweep_seed;
      if (!sweep_out.empty()) cfg.output = sweep_out;
      cfg.validate();
      const SweepReport report = run_sweep(cfg, sweep_workers);
      write_sweep_report(cfg, report);
      for (const auto& f : report.failures)
        std::cerr << "failure: n=" << f.n << " p=" << f.p << " rho=" << f.rho << " seed="
                  << f.seed_index << " " << to_string(f.estimator) << ": " << f.message << '\n';
      std::cout << report.rows.size() << " rows, " << report.summary.size() << " summary rows, "
                << report.failures.size() << " failures; outputs in " << cfg.output.string() << '\n';
      return kExitOk;
    }

    if (sel->parsed()) {
      const auto edges = io::read_edge_list(sel_graph, false, sel_n);
      const auto observed = io::read_edge_list(sel_mask, true, sel_n);
      const int n = sel_n.value_or(std::max(edges.n, observed.n));
      const AdjacencyMatrix a = io::to_adjacency(edges, n);
      const SamplingMask x = io::to_mask(observed, n);
      const SelectionResult r = select_k(a, x, parse_k_range(sel_range), em_from(sel_config, sel_seed));
      auto out = io::open_output(sel_out);
      out.precision(17);
      out << "k,score,converged\n";
      for (const auto& s : r.scores) out << s.k << ',' << s.score << ',' << (s.converged ? 1 : 0) << '\n';
      std::cout << "k_hat = " << r.k_hat << '\n';
      return kExitOk;
    }

    if (ev->parsed()) {
      std::ifstream theta_in(ev_theta);
      require(static_cast<bool>(theta_in), ErrorKind::kData, "cannot open " + ev_theta);
      const ThetaMatrix theta(io::parse_matrix_csv(theta_in, ev_theta));
      const int n = theta.n();
      theta.validate(1e-12);
      const AdjacencyMatrix a = io::to_adjacency(io::read_edge_list(ev_graph, false, n), n);
      const SamplingMask eval_mask = ev_eval_mask.empty()
                                         ? SamplingMask::full(n)
                                         : io::to_mask(io::read_edge_list(ev_eval_mask, true, n), n);
      ensure_dir(ev_out);
      const std::filesystem::path dir = ev_out;
      const PrCurve curve = precision_recall(theta, a, eval_mask);
      {
        auto out = io::open_output(dir / "pr_curve.csv");
        out.precision(17);
        out << "threshold,precision,recall\n";
        for (const auto& p : curve.points) out << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
      }
      auto out = io::open_output(dir / "errors.csv");
      out.precision(17);
      out << "estimator,metric,value\n";
      out << ev_name << ",average_precision," << average_precision(curve) << '\n';
      if (!ev_train_mask.empty()) {
        const SamplingMask train = io::to_mask(io::read_edge_list(ev_train_mask, true, n), n);
        out << ev_name << ",heldout," << heldout_error(theta, a, train) << '\n';
      }
      if (!ev_truth.empty()) {
        std::ifstream truth_in(ev_truth);
        require(static_cast<bool>(truth_in), ErrorKind::kData, "cannot open " + ev_truth);
        const ThetaMatrix truth(io::parse_matrix_csv(truth_in, ev_truth));
        out << ev_name << ",frobenius," << frobenius_error(theta, truth) << '\n';
      }
      std::cout << "average precision " << average_precision(curve) << "; outputs in "
                << dir.string() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kExitOk;
}

}  // namespace sbmvar::cli
