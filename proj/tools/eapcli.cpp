// Batch experiment runner: clusters a CSV or synthetic dataset with static
// AP, EAP, or EAP without consensus nodes, and writes JSON/CSV results.
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eap/dataset.hpp"
#include "eap/engine.hpp"
#include "eap/errors.hpp"
#include "eap/metrics.hpp"
#include "eap/result_io.hpp"
#include "eap/similarity.hpp"
#include "eap/synthetic.hpp"

namespace {

using namespace eap;

struct CommonOpts {
  std::string algo = "eap";
  std::string csv_path;
  std::vector<std::string> synthetic;
  std::uint64_t seed = 1;
  int n_points = 200;
  double gamma = 2.0;
  double omega = 1.0;
  double lambda = 0.9;
  int max_iter = 500;
  int conv_window = 20;
  int min_cluster_size = 1;
  std::string preference = "per-time-min";
  std::string out_dir = ".";
  bool emit_plot_data = false;
  bool exclude_imputed = false;
  bool no_normalize = false;
  std::string id_col = "id";
  std::string time_col = "t";
  std::string label_col = "label";
};

void add_common_options(CLI::App* cmd, CommonOpts* o) {
  // Every option can also be set through an EAP_-prefixed environment
  // variable.
  cmd->add_option("--csv", o->csv_path, "CSV dataset path")->envname("EAP_CSV");
  cmd->add_option("--synthetic", o->synthetic,
                  "synthetic scenario(s): separated|colliding|"
                  "cluster-change|third-cluster")
      ->delimiter(',')
      ->envname("EAP_SYNTHETIC");
  cmd->add_option("--seed", o->seed, "generator seed")->envname("EAP_SEED");
  cmd->add_option("--n-points", o->n_points, "synthetic dataset size")
      ->envname("EAP_N_POINTS");
  cmd->add_option("--gamma", o->gamma, "temporal smoothness penalty")
      ->envname("EAP_GAMMA");
  cmd->add_option("--omega", o->omega, "consensus reward")
      ->envname("EAP_OMEGA");
  cmd->add_option("--lambda", o->lambda, "damping factor")
      ->envname("EAP_LAMBDA");
  cmd->add_option("--max-iter", o->max_iter, "maximum iterations")
      ->envname("EAP_MAX_ITER");
  cmd->add_option("--conv-window", o->conv_window,
                  "iterations with stable exemplars before convergence")
      ->envname("EAP_CONV_WINDOW");
  cmd->add_option("--min-cluster-size", o->min_cluster_size,
                  "consensus creation threshold")
      ->envname("EAP_MIN_CLUSTER_SIZE");
  cmd->add_option("--preference", o->preference,
                  "per-time-min | global-min | const:<x>")
      ->envname("EAP_PREFERENCE");
  cmd->add_option("--out", o->out_dir, "output directory")->envname("EAP_OUT");
  cmd->add_flag("--emit-plot-data", o->emit_plot_data,
                "write per-time Rand index rows for plotting");
  cmd->add_flag("--exclude-imputed", o->exclude_imputed,
                "exclude imputed points from metrics");
  cmd->add_flag("--no-normalize", o->no_normalize,
                "skip global normalization of CSV features");
  cmd->add_option("--id-col", o->id_col, "CSV id column name")
      ->envname("EAP_ID_COL");
  cmd->add_option("--time-col", o->time_col, "CSV time column name")
      ->envname("EAP_TIME_COL");
  cmd->add_option("--label-col", o->label_col, "CSV label column name")
      ->envname("EAP_LABEL_COL");
}

PreferenceMode parse_preference(const std::string& s, double* constant) {
  if (s == "per-time-min") return PreferenceMode::PerTimeMin;
  if (s == "global-min") return PreferenceMode::GlobalMin;
  if (s.rfind("const:", 0) == 0) {
    *constant = std::stod(s.substr(6));
    return PreferenceMode::Constant;
  }
  fail(ErrorKind::Config, "unknown preference mode '" + s + "'");
}

std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct LoadedDataset {
  DatasetSeries ds;
  std::string source;
  std::string name;  // short label for file names / compare rows
};

LoadedDataset load_dataset(const CommonOpts& o, const std::string& synthetic) {
  LoadedDataset out;
  if (!o.csv_path.empty() && !synthetic.empty())
    fail(ErrorKind::Config, "--csv and --synthetic are mutually exclusive");
  if (o.csv_path.empty() && synthetic.empty())
    fail(ErrorKind::Config, "one of --csv or --synthetic is required");
  if (!synthetic.empty()) {
    GaussianScenario sc;
    sc.kind = gaussian_kind_from_name(synthetic);
    sc.n_points = o.n_points;
    sc.seed = o.seed;
    out.ds = normalize_synthetic(gen_gaussian(sc));
    out.source = "synthetic:" + synthetic;
    out.name = synthetic;
  } else {
    CsvSchema schema{o.id_col, o.time_col, o.label_col};
    out.ds = load_csv(o.csv_path, schema);
    if (!o.no_normalize) out.ds = normalize_global(out.ds);
    out.source = "csv:" + o.csv_path;
    out.name = std::filesystem::path(o.csv_path).stem().string();
  }
  return out;
}

EapConfig make_config(const CommonOpts& o, const std::string& algo) {
  EapConfig cfg;
  cfg.gamma = o.gamma;
  cfg.omega = o.omega;
  cfg.lambda = o.lambda;
  cfg.max_iter = o.max_iter;
  cfg.conv_window = o.conv_window;
  cfg.min_cluster_size = o.min_cluster_size;
  cfg.seed = o.seed;
  if (algo == "eap-nocn") {
    cfg.enable_consensus = false;
    cfg.omega = 0.0;  // noCN is defined as EAP with omega = 0
  } else if (algo == "ap") {
    cfg.enable_consensus = false;
  } else if (algo != "eap") {
    fail(ErrorKind::Config,
         "unknown algorithm '" + algo + "' (expected ap|eap|eap-nocn)");
  }
  cfg.validate();
  return cfg;
}

struct RunOutput {
  ClusteringSolution sol;
  SolutionMetrics metrics;
};

RunOutput execute(const std::string& algo, const LoadedDataset& data,
                  const CommonOpts& o, const EapConfig& cfg) {
  double pref_const = 0.0;
  PreferenceMode mode = parse_preference(o.preference, &pref_const);
  SimilarityTensor sim = build_similarity(data.ds);
  set_preferences(sim, data.ds, mode, pref_const);

  RunOutput out;
  if (algo == "ap")
    out.sol = run_static_ap(data.ds, sim, cfg);
  else
    out.sol = run_eap(data.ds, sim, cfg);
  out.metrics = evaluate_solution(out.sol, data.ds, o.exclude_imputed);
  return out;
}

int cmd_run(const CommonOpts& o) {
  LoadedDataset data =
      load_dataset(o, o.synthetic.empty() ? "" : o.synthetic.front());
  EapConfig cfg = make_config(o, o.algo);
  RunOutput r = execute(o.algo, data, o, cfg);

  std::filesystem::create_directories(o.out_dir);
  RunMeta meta{o.algo, data.source, o.preference, cfg, timestamp_now()};
  nlohmann::json j = solution_to_json(r.sol, r.metrics, meta);
  auto problems = validate_solution_json(j);
  if (!problems.empty()) {
    for (const auto& p : problems)
      std::cerr << "result schema violation: " << p << '\n';
    return 1;
  }
  std::string base = o.out_dir + "/" + o.algo + "-" + data.name;
  write_json(j, base + "-result.json");
  write_assignments_csv(r.sol, base + "-assignments.csv");
  write_metrics_csv(r.metrics, base + "-metrics.csv");
  if (o.emit_plot_data) {
    if (!r.metrics.has_truth) {
      std::cerr << "warning: no ground-truth labels; plot data skipped\n";
    } else {
      std::string rows = "t,algorithm,rand\n";
      append_plot_rows(r.metrics, o.algo, &rows);
      std::ofstream(base + "-rand-per-t.csv") << rows;
    }
  }

  std::cout << o.algo << " on " << data.source << ": "
            << (r.sol.converged ? "converged" : "max-iter") << " after "
            << r.sol.iterations << " iteration(s), "
            << r.metrics.tracks.distinct_exemplars_total
            << " distinct exemplar(s)";
  if (r.metrics.has_truth) std::cout << ", mean Rand " << r.metrics.mean_rand;
  std::cout << "\nresults: " << base << "-result.json ("
            << j["determinism_hash"].get<std::string>() << ")\n";
  return r.sol.converged ? 0 : 2;
}

int cmd_compare(const CommonOpts& o, const std::vector<std::string>& algos) {
  if (!o.csv_path.empty() && !o.synthetic.empty())
    fail(ErrorKind::Config,
         "compare refuses mixed dataset sources; use --csv or --synthetic");
  std::vector<std::string> datasets =
      o.synthetic.empty() ? std::vector<std::string>{""} : o.synthetic;

  std::filesystem::create_directories(o.out_dir);
  std::string table =
      "algorithm,dataset,mean_rand,mean_mod_rand,distinct_exemplars,"
      "mean_clusters,converged,iterations\n";
  std::string plot = "t,algorithm,dataset,rand\n";
  bool all_converged = true;
  char buf[256];
  for (const std::string& synth : datasets) {
    LoadedDataset data = load_dataset(o, synth);
    for (const std::string& algo : algos) {
      EapConfig cfg = make_config(o, algo);
      RunOutput r = execute(algo, data, o, cfg);
      all_converged = all_converged && r.sol.converged;
      std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.6g,%d,%.6g,%d,%d\n",
                    algo.c_str(), data.name.c_str(), r.metrics.mean_rand,
                    r.metrics.mean_mod_rand,
                    r.metrics.tracks.distinct_exemplars_total,
                    r.metrics.tracks.mean_clusters, r.sol.converged ? 1 : 0,
                    r.sol.iterations);
      table += buf;
      if (o.emit_plot_data && r.metrics.has_truth) {
        for (std::size_t t = 0; t < r.metrics.rand_per_t.size(); ++t) {
          if (std::isnan(r.metrics.rand_per_t[t])) continue;
          std::snprintf(buf, sizeof(buf), "%zu,%s,%s,%.12g\n", t + 1,
                        algo.c_str(), data.name.c_str(),
                        r.metrics.rand_per_t[t]);
          plot += buf;
        }
      }
    }
  }
  std::ofstream(o.out_dir + "/comparison.csv") << table;
  if (o.emit_plot_data) std::ofstream(o.out_dir + "/rand-per-t.csv") << plot;
  std::cout << table;
  return all_converged ? 0 : 2;
}

int cmd_gen(const CommonOpts& o, const std::string& out_file) {
  if (o.synthetic.empty()) fail(ErrorKind::Config, "gen requires --synthetic");
  GaussianScenario sc;
  sc.kind = gaussian_kind_from_name(o.synthetic.front());
  sc.n_points = o.n_points;
  sc.seed = o.seed;
  DatasetSeries ds = gen_gaussian(sc);
  save_csv(ds, out_file);
  std::cout << "wrote " << out_file << " (" << ds.n_points() << " points, "
            << ds.time_steps() << " steps)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary affinity propagation experiment runner"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "cluster one dataset");
  run->add_option("--algo", run_opts.algo, "ap | eap | eap-nocn")
      ->envname("EAP_ALGO");
  add_common_options(run, &run_opts);

  CommonOpts cmp_opts;
  std::vector<std::string> algos{"ap", "eap", "eap-nocn"};
  CLI::App* cmp = app.add_subcommand(
      "compare", "run several algorithms on the same dataset(s)");
  cmp->add_option("--algos", algos, "comma-separated algorithm list")
      ->delimiter(',')
      ->envname("EAP_ALGOS");
  add_common_options(cmp, &cmp_opts);

  CommonOpts gen_opts;
  std::string gen_out = "dataset.csv";
  CLI::App* gen = app.add_subcommand("gen", "dump a synthetic dataset to CSV");
  add_common_options(gen, &gen_opts);
  gen->add_option("--out-file", gen_out, "output CSV path")
      ->envname("EAP_OUT_FILE");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (cmp->parsed()) return cmd_compare(cmp_opts, algos);
    if (gen->parsed()) return cmd_gen(gen_opts, gen_out);
  } catch (const eap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
