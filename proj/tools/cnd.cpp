#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cnd/detector.hpp"
#include "cnd/error.hpp"
#include "cnd/filter.hpp"
#include "cnd/graph.hpp"
#include "cnd/harness.hpp"
#include "cnd/io.hpp"
#include "cnd/signal.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cnd;

namespace {

struct SolverOptions {
  std::optional<double> step_a, step_b, lambda_b, lambda_l, lambda_s;
  int iters = 10000;
  std::uint64_t seed = 0;
  bool relative = false;

  void add_to(CLI::App* app) {
    app->add_option("--step-a", step_a, "NMF step parameter a in (0, 1]");
    app->add_option("--step-b", step_b, "NMF step parameter b in (0, 1]");
    app->add_option("--lambda-b", lambda_b, "NMF sparsity weight (default 0.001 m)");
    app->add_option("--iters", iters, "NMF iterations")->capture_default_str();
    app->add_option("--lambda-l", lambda_l, "RPCA nuclear-norm weight (default 0.2)");
    app->add_option("--lambda-s", lambda_s, "RPCA l1 weight (default 0.2 + 2/sqrt(k))");
    app->add_flag("--relative-weights", relative, "scale RPCA weights by max |H|");
    app->add_option("--seed", seed, "NMF initialization seed")->capture_default_str();
  }

  NmfConfig nmf(Index k) const {
    NmfConfig c;
    c.k = k;
    if (step_a) c.step_a = *step_a;
    if (step_b) c.step_b = *step_b;
    c.lambda_b = lambda_b;
    c.max_iters = iters;
    c.seed = seed;
    return c;
  }

  RpcaConfig rpca() const {
    RpcaConfig c;
    if (lambda_l) c.lambda_l = *lambda_l;
    c.lambda_s = lambda_s;
    c.relative = relative;
    return c;
  }
};

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

template <typename V>
json to_json_array(const V& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i) a.push_back(v[i]);
  return a;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string graph = "cp";
  CpParams cp;
  BaParams ba;
  std::string filter = "iir:0.02";
  ExcitationParams exc;
  Index m = 200;
  double sigma2 = 0.01;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  std::shared_ptr<const Graph> g;
  std::vector<Index> core;
  CpParams cp = a.cp;
  BaParams ba = a.ba;
  cp.seed = ba.seed = a.seed;
  if (a.graph == "cp") {
    g = std::make_shared<const Graph>(generate_cp(cp));
    core.resize(static_cast<size_t>(cp.core_size));
    for (Index i = 0; i < cp.core_size; ++i) core[static_cast<size_t>(i)] = i;
  } else if (a.graph == "ba") {
    g = std::make_shared<const Graph>(generate_ba(ba));
  } else {
    g = std::make_shared<const Graph>(read_graph(a.graph));
  }
  ExcitationParams exc = a.exc;
  exc.seed = a.seed;
  const GraphFilter filter = GraphFilter::parse(a.filter);
  const SignalDataset ds = generate_dataset(g, filter, exc, a.m, a.sigma2, core);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_matrix_csv(ds.y, dir / "Y.csv");
  write_matrix_csv(ds.truth->b, dir / "B.csv");
  write_matrix_csv(ds.truth->z, dir / "Z.csv");
  write_edge_list(*g, dir / "graph.edges");

  const FrequencyProfile prof = frequency_profile(filter, g->spectrum());
  json meta = {{"n", g->size()},
               {"m", a.m},
               {"k", exc.k},
               {"filter", filter.to_string()},
               {"sigma2", a.sigma2},
               {"seed", a.seed},
               {"graph", a.graph},
               {"eta", prof.eta},
               {"spectral_gap", spectral_gap(*g)},
               {"core", ds.truth->core},
               {"eigencentrality", to_json_array(eigencentrality(*g))}};
  write_json(meta, (dir / "meta.json").string());
  std::cerr << "wrote " << g->size() << " x " << a.m << " dataset to " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  std::string method = "two-stage";
  std::string input, z, out, trace;
  Index c = 10;
  std::optional<Index> k;
  int restarts = 1;
  std::optional<Index> knn;
  bool center = false;
  SolverOptions solver;
};

int run_detect(const DetectArgs& a) {
  const Eigen::MatrixXd y = read_matrix_csv(a.input);
  require(a.c >= 1 && a.c <= y.rows(), "--c must lie in [1, n]");
  const Method method = parse_method(a.method);
  DetectionResult r;
  json extra = json::object();
  switch (method) {
    case Method::Pca: r = detect_pca(y, a.c, PcaOptions{a.center}); break;
    case Method::Knn: r = detect_knn_baseline(y, a.knn.value_or(default_knn(y.rows())), a.c); break;
    case Method::Rpca: {
      require(!a.z.empty(), "rpca needs --z");
      r = detect_rpca_semiblind(y, read_matrix_csv(a.z), a.solver.rpca(), a.c);
      break;
    }
    case Method::TwoStage: {
      Index k = 0;
      if (a.k) {
        k = *a.k;
      } else {
        k = estimate_rank(y);
        std::cerr << "estimated k = " << k << '\n';
      }
      extra["k"] = k;
      TwoStageTrace trace;
      r = detect_two_stage(y, a.solver.nmf(k), a.solver.rpca(), a.c, a.restarts, &trace);
      if (!a.trace.empty()) write_trace_csv(trace.nmf.objective_trace, a.trace);
      break;
    }
  }
  json j = {{"method", r.method},
            {"scores", to_json_array(r.scores)},
            {"ranking", r.ranking},
            {"top_c", r.top_c}};
  if (!r.frequency.empty()) j["frequency"] = r.frequency;
  if (y.rows() >= 2 && y.cols() >= 2) {
    j["moment_ratio"] = moment_ratio(y, a.center);
    j["filter_strength"] = to_string(classify_filter_strength(y, 0.25, a.center));
  }
  j.update(extra);
  write_json(j, a.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config, out;
  std::optional<int> trials;
  unsigned workers = 0;
  bool quiet = false;
};

int run_bench(const BenchArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.trials) cfg.trials = *a.trials;
  if (!a.out.empty()) cfg.output = a.out;
  require(!cfg.output.empty(), "no output path (set output in the config or pass --out)");
  cfg.validate();
  auto progress = [&](int done, int total) {
    if (!a.quiet) std::cerr << "\rtrial " << done << "/" << total << std::flush;
  };
  const BenchResult res = run_sweep(cfg, a.workers, progress);
  if (!a.quiet) std::cerr << '\n';
  write_bench_csv(res, cfg, cfg.output);
  for (const auto& row : res.rows) {
    std::cout << to_string(cfg.sweep) << "=" << row.value << "  " << to_string(row.method) << "  error "
              << row.mean << " +/- " << row.stddev << "  (" << row.trials << " ok, " << row.failures
              << " failed)\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string input, g, out;
  double split = 0.8;
  Index k = 10;
  Index c = 10;
  int restarts = 100;
  bool shift_min = false;
  SolverOptions solver;
};

int run_eval(const EvalArgs& a) {
  const Eigen::MatrixXd y = read_matrix_csv(a.input);
  const Eigen::VectorXd g = read_vector_csv(a.g);
  EvalConfig cfg;
  cfg.split = a.split;
  cfg.k = a.k;
  cfg.c = a.c;
  cfg.restarts = a.restarts;
  cfg.shift_min = a.shift_min;
  cfg.nmf = a.solver.nmf(a.k);
  cfg.rpca = a.solver.rpca();
  const EvalReport rep = eval_real(y, g, cfg);

  json nodes = json::array();
  for (const auto& ns : rep.nodes) nodes.push_back({{"node", ns.node}, {"frequency", ns.frequency}, {"corr", ns.corr}});
  json methods = json::array();
  for (const auto& ms : rep.methods) {
    methods.push_back({{"method", ms.method}, {"top_c", ms.top_c}, {"mean_corr", ms.mean_corr}, {"std_corr", ms.std_corr}});
    std::cout << ms.method << ": mean corr " << ms.mean_corr << " +/- " << ms.std_corr << '\n';
  }
  if (!a.out.empty())
    write_json({{"train_columns", rep.train_columns}, {"nodes", nodes}, {"methods", methods}}, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind central-node detection from filtered graph signals"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "synthesize a graph-signal dataset");
  g->add_option("--graph", gen.graph, "cp, ba, or a graph file (.csv adjacency or edge list)")->capture_default_str();
  g->add_option("--n", gen.cp.n, "node count for generated graphs")->capture_default_str();
  g->add_option("--p1", gen.cp.p1, "CP core-core edge probability")->capture_default_str();
  g->add_option("--p2", gen.cp.p2, "CP periphery edge probability")->capture_default_str();
  g->add_option("--core-size", gen.cp.core_size, "CP core size")->capture_default_str();
  g->add_option("--m-attach", gen.ba.m_attach, "BA edges per new node")->capture_default_str();
  g->add_option("--filter", gen.filter, "iir:C, diffusion:A or poly:h0,h1,...")->capture_default_str();
  g->add_option("--k", gen.exc.k, "excitation rank")->capture_default_str();
  g->add_option("--b-density", gen.exc.b_density, "nonzero fraction of B")->capture_default_str();
  g->add_option("--z-density", gen.exc.z_density, "nonzero fraction of Z")->capture_default_str();
  g->add_option("--m", gen.m, "number of samples")->capture_default_str();
  g->add_option("--sigma2", gen.sigma2, "noise variance")->capture_default_str();
  g->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->required();

  DetectArgs det;
  auto* d = app.add_subcommand("detect", "detect central nodes from a data matrix");
  d->add_option("--method", det.method, "pca, two-stage, rpca or knn")->capture_default_str();
  d->add_option("--input", det.input, "n x m data CSV")->required()->check(CLI::ExistingFile);
  d->add_option("--z", det.z, "k x m latent CSV (rpca)")->check(CLI::ExistingFile);
  d->add_option("--c", det.c, "number of central nodes")->capture_default_str();
  d->add_option("--k", det.k, "excitation rank (estimated when omitted)");
  d->add_option("--restarts", det.restarts, "two-stage restarts")->capture_default_str();
  d->add_option("--knn", det.knn, "neighbours per node for the knn baseline");
  d->add_flag("--center", det.center, "remove row means before PCA");
  d->add_option("--trace", det.trace, "write the NMF objective trace to this CSV");
  d->add_option("--out", det.out, "result JSON (stdout when omitted)");
  det.solver.add_to(d);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run a Monte-Carlo sweep");
  b->add_option("--config", bench.config, "sweep config file")->required()->check(CLI::ExistingFile);
  b->add_option("--out", bench.out, "results CSV");
  b->add_option("--trials", bench.trials, "override the trial count");
  b->add_option("--workers", bench.workers, "worker threads (default CND_WORKERS or all cores)");
  b->add_flag("--quiet", bench.quiet, "no progress output");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "train/test evaluation on real data");
  e->add_option("--input", ev.input, "n x m data CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--g", ev.g, "global outcome series over the test block")->required()->check(CLI::ExistingFile);
  e->add_option("--split", ev.split, "train fraction")->capture_default_str();
  e->add_option("--k", ev.k, "excitation rank")->capture_default_str();
  e->add_option("--c", ev.c, "number of central nodes")->capture_default_str();
  e->add_option("--restarts", ev.restarts, "two-stage restarts")->capture_default_str();
  e->add_flag("--shift-min", ev.shift_min, "subtract the global minimum first");
  e->add_option("--out", ev.out, "report JSON");
  ev.solver.add_to(e);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*g) return run_generate(gen);
    if (*d) return run_detect(det);
    if (*b) return run_bench(bench);
    if (*e) return run_eval(ev);
  } catch (const SolverError& err) {
    std::cerr << "solver error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 1;
}
