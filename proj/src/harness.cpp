#include "cnd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "cnd/error.hpp"
#include "cnd/random.hpp"

namespace cnd {

double error_rate(const std::vector<Index>& truth, const std::vector<Index>& detected, Index c) {
  require(c >= 1, "error rate needs c >= 1");
  require(static_cast<Index>(truth.size()) == c && static_cast<Index>(detected.size()) == c,
          "error rate: both node sets must have exactly c members");
  std::vector<Index> a = truth, b = detected;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  require(std::adjacent_find(a.begin(), a.end()) == a.end() && std::adjacent_find(b.begin(), b.end()) == b.end(),
          "error rate: node sets must not contain duplicates");
  std::vector<Index> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return 1.0 - static_cast<double>(common.size()) / static_cast<double>(c);
}

double correlation_score(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  require(x.size() == g.size(), "correlation score: length mismatch");
  const double nx = x.norm(), ng = g.norm();
  require(nx > 0.0 && ng > 0.0, "correlation score undefined for a zero vector");
  return x.dot(g) / (nx * ng);
}

Method parse_method(const std::string& name) {
  if (name == "pca") return Method::Pca;
  if (name == "two-stage" || name == "two_stage") return Method::TwoStage;
  if (name == "rpca") return Method::Rpca;
  if (name == "knn") return Method::Knn;
  throw InputError("unknown detector '" + name + "' (expected pca, two-stage, rpca or knn)");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Pca: return "pca";
    case Method::TwoStage: return "two-stage";
    case Method::Rpca: return "rpca";
    case Method::Knn: return "knn";
  }
  return "?";
}

SweepVar parse_sweep_var(const std::string& name) {
  if (name == "k") return SweepVar::K;
  if (name == "p1") return SweepVar::P1;
  if (name == "n") return SweepVar::N;
  if (name == "m") return SweepVar::M;
  throw InputError("unknown sweep variable '" + name + "' (expected k, p1, n or m)");
}

TruthKind parse_truth_kind(const std::string& name) {
  if (name == "core") return TruthKind::Core;
  if (name == "eig" || name == "eigencentrality") return TruthKind::Eigencentrality;
  throw InputError("unknown truth '" + name + "' (expected core or eig)");
}

const char* to_string(TruthKind t) { return t == TruthKind::Core ? "core" : "eig"; }

const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::K: return "k";
    case SweepVar::P1: return "p1";
    case SweepVar::N: return "n";
    case SweepVar::M: return "m";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  require(!values.empty(), "sweep values must be nonempty");
  require(trials >= 1, "trials must be >= 1");
  require(!detectors.empty(), "at least one detector is required");
  require(c >= 1, "c must be >= 1");
  require(m >= 1, "m must be >= 1");
  require(sigma2 >= 0.0, "sigma2 must be nonnegative");
  if (sweep == SweepVar::P1) require(graph.kind == GraphKind::Cp, "p1 sweeps need a CP graph");
  if (sweep == SweepVar::N) require(graph.kind != GraphKind::File, "n sweeps need a generated graph");
  if (graph.kind == GraphKind::File) require(!graph.file.empty(), "graph file path is missing");
  for (double v : values) {
    require(std::isfinite(v), "sweep values must be finite");
    if (sweep != SweepVar::P1) require(v >= 1.0 && v == std::round(v), "k, n and m sweep values must be positive integers");
  }
}

const BenchRow& BenchResult::at(double value, Method method) const {
  for (const auto& r : rows)
    if (r.value == value && r.method == method) return r;
  throw InputError(std::string("no result for detector ") + to_string(method) + " at value " + std::to_string(value));
}

std::uint64_t trial_seed(std::uint64_t base, double value, int trial) {
  return derive_seed(base, {std::bit_cast<std::uint64_t>(value), static_cast<std::uint64_t>(trial)});
}

namespace {

constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kExcitationStream = 2;
constexpr std::uint64_t kNmfStream = 3;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::shared_ptr<const Graph> load_file_graph(const ExperimentConfig& cfg) {
  if (cfg.graph.kind != GraphKind::File) return nullptr;
  return std::make_shared<const Graph>(read_graph(cfg.graph.file));
}

TrialOutcome trial_impl(const ExperimentConfig& cfg, double value, int trial, std::shared_ptr<const Graph> file_graph) {
  const std::uint64_t seed = trial_seed(cfg.base_seed, value, trial);
  const auto nd = static_cast<size_t>(cfg.detectors.size());
  TrialOutcome out{std::vector<double>(nd, kNaN), std::vector<double>(nd, 0.0)};

  CpParams cp = cfg.graph.cp;
  BaParams ba = cfg.graph.ba;
  ExcitationParams exc = cfg.excitation;
  Index m = cfg.m;
  const auto as_index = static_cast<Index>(std::llround(value));
  switch (cfg.sweep) {
    case SweepVar::K: exc.k = as_index; break;
    case SweepVar::P1: cp.p1 = value; break;
    case SweepVar::N: cp.n = ba.n = as_index; break;
    case SweepVar::M: m = as_index; break;
  }
  cp.seed = ba.seed = derive_seed(seed, {kGraphStream});
  exc.seed = derive_seed(seed, {kExcitationStream});

  SignalDataset ds;
  try {
    std::shared_ptr<const Graph> g;
    std::vector<Index> core;
    switch (cfg.graph.kind) {
      case GraphKind::Cp:
        g = std::make_shared<const Graph>(generate_cp(cp));
        if (cfg.truth == TruthKind::Core && cp.core_size == cfg.c) {
          core.resize(static_cast<size_t>(cfg.c));
          std::iota(core.begin(), core.end(), Index{0});
        }
        break;
      case GraphKind::Ba: g = std::make_shared<const Graph>(generate_ba(ba)); break;
      case GraphKind::File: g = std::move(file_graph); break;
    }
    if (core.empty()) core = top_c_nodes(eigencentrality(*g), cfg.c);
    ds = generate_dataset(g, cfg.filter, exc, m, cfg.sigma2, std::move(core));
  } catch (const std::exception&) {
    return out;
  }
  const GroundTruth& truth = *ds.truth;

  for (size_t d = 0; d < nd; ++d) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      DetectionResult r;
      switch (cfg.detectors[d]) {
        case Method::Pca: r = detect_pca(ds.y, cfg.c); break;
        case Method::Rpca: r = detect_rpca_semiblind(ds.y, truth.z, cfg.rpca, cfg.c); break;
        case Method::Knn:
          r = detect_knn_baseline(ds.y, cfg.knn < 0 ? default_knn(ds.y.rows()) : cfg.knn, cfg.c);
          break;
        case Method::TwoStage: {
          NmfConfig nmf = cfg.nmf;
          nmf.k = exc.k;
          nmf.seed = derive_seed(seed, {kNmfStream});
          r = detect_two_stage(ds.y, nmf, cfg.rpca, cfg.c);
          break;
        }
      }
      out.errors[d] = error_rate(truth.core, r.top_c, cfg.c);
    } catch (const std::exception&) {
      out.errors[d] = kNaN;
    }
    out.seconds[d] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& cfg, double value, int trial) {
  cfg.validate();
  return trial_impl(cfg, value, trial, load_file_graph(cfg));
}

unsigned default_workers() {
  if (const char* env = std::getenv("CND_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchResult run_sweep(const ExperimentConfig& cfg, unsigned workers,
                      const std::function<void(int, int)>& progress) {
  cfg.validate();
  const auto file_graph = load_file_graph(cfg);
  const int nv = static_cast<int>(cfg.values.size());
  const int total = nv * cfg.trials;
  std::vector<TrialOutcome> outcomes(static_cast<size_t>(total));

  std::atomic<int> next{0};
  std::mutex progress_mu;
  int done = 0;
  auto work = [&] {
    for (int task = next++; task < total; task = next++) {
      const double value = cfg.values[static_cast<size_t>(task / cfg.trials)];
      outcomes[static_cast<size_t>(task)] = trial_impl(cfg, value, task % cfg.trials, file_graph);
      if (progress) {
        std::lock_guard lock(progress_mu);
        progress(++done, total);
      }
    }
  };
  if (workers == 0) workers = default_workers();
  workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  BenchResult res;
  for (int v = 0; v < nv; ++v) {
    for (size_t d = 0; d < cfg.detectors.size(); ++d) {
      BenchRow row;
      row.value = cfg.values[static_cast<size_t>(v)];
      row.method = cfg.detectors[d];
      std::vector<double> errs;
      for (int t = 0; t < cfg.trials; ++t) {
        const TrialOutcome& o = outcomes[static_cast<size_t>(v * cfg.trials + t)];
        row.seconds += o.seconds[d];
        if (std::isnan(o.errors[d]))
          ++row.failures;
        else
          errs.push_back(o.errors[d]);
      }
      row.trials = static_cast<int>(errs.size());
      if (!errs.empty()) {
        row.mean = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
        double ss = 0.0;
        for (double e : errs) ss += (e - row.mean) * (e - row.mean);
        row.stddev = errs.size() > 1 ? std::sqrt(ss / static_cast<double>(errs.size() - 1)) : 0.0;
      } else {
        row.mean = row.stddev = kNaN;
      }
      res.rows.push_back(row);
    }
  }
  return res;
}

void write_bench_csv(const BenchResult& result, const ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(10);
  out << to_string(cfg.sweep) << ",method,mean_error,std_error,trials,failures,seconds\n";
  for (const auto& r : result.rows)
    out << r.value << ',' << to_string(r.method) << ',' << r.mean << ',' << r.stddev << ',' << r.trials << ','
        << r.failures << ',' << r.seconds << '\n';
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd shift_to_nonnegative(const Eigen::MatrixXd& y) {
  if (y.size() == 0) return y;
  return y.array() - y.minCoeff();
}

namespace {

MethodSummary summarize(std::string method, std::vector<Index> top_c, const std::vector<NodeScore>& nodes) {
  MethodSummary s;
  s.method = std::move(method);
  s.top_c = std::move(top_c);
  double sum = 0.0, ss = 0.0;
  for (Index i : s.top_c) sum += nodes[static_cast<size_t>(i)].corr;
  const auto c = static_cast<double>(s.top_c.size());
  s.mean_corr = sum / c;
  for (Index i : s.top_c) {
    const double d = nodes[static_cast<size_t>(i)].corr - s.mean_corr;
    ss += d * d;
  }
  s.std_corr = s.top_c.size() > 1 ? std::sqrt(ss / (c - 1.0)) : 0.0;
  return s;
}

std::vector<int> two_stage_frequency(const Eigen::MatrixXd& y, Index c, int restarts, const NmfConfig& nmf,
                                     const RpcaConfig& rpca) {
  DetectionResult r = detect_two_stage(y, nmf, rpca, c, restarts);
  if (!r.frequency.empty()) return r.frequency;
  std::vector<int> freq(static_cast<size_t>(y.rows()), 0);
  for (Index i : r.top_c) freq[static_cast<size_t>(i)] = 1;
  return freq;
}

}  // namespace

EvalReport eval_real(const Eigen::MatrixXd& y_in, const Eigen::VectorXd& g, const EvalConfig& cfg) {
  require(y_in.allFinite(), "data contains non-finite values");
  const Eigen::MatrixXd y = cfg.shift_min ? shift_to_nonnegative(y_in) : y_in;
  require(y.size() == 0 || y.minCoeff() >= 0.0, "data must be nonnegative (use the min-shift option)");
  require(cfg.split > 0.0 && cfg.split < 1.0, "split must lie in (0, 1)");
  require(cfg.restarts >= 1, "restarts must be >= 1");
  const Index n = y.rows(), m = y.cols();
  const auto train = static_cast<Index>(std::floor(cfg.split * static_cast<double>(m)));
  require(train >= 2 && train < m, "split leaves an empty train or test block");
  require(g.size() == m - train, "g length must match the test block (" + std::to_string(m - train) + " columns)");
  require(cfg.c >= 1 && cfg.c <= n, "c must lie in [1, n]");

  const Eigen::MatrixXd y_train = y.leftCols(train);
  const Eigen::MatrixXd y_test = y.rightCols(m - train);

  EvalReport rep;
  rep.train_columns = train;
  rep.nodes.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    NodeScore& ns = rep.nodes[static_cast<size_t>(i)];
    ns.node = i;
    const Eigen::VectorXd row = y_test.row(i).transpose();
    ns.corr = row.norm() > 0.0 ? correlation_score(row, g) : 0.0;
  }

  NmfConfig nmf = cfg.nmf;
  nmf.k = cfg.k;
  const std::vector<int> freq = two_stage_frequency(y_train, cfg.c, cfg.restarts, nmf, cfg.rpca);
  Eigen::VectorXd fscore(n);
  for (Index i = 0; i < n; ++i) {
    rep.nodes[static_cast<size_t>(i)].frequency = freq[static_cast<size_t>(i)];
    fscore[i] = freq[static_cast<size_t>(i)];
  }
  rep.methods.push_back(summarize("two-stage", top_c_nodes(fscore, cfg.c), rep.nodes));
  rep.methods.push_back(summarize("pca", detect_pca(y_train, cfg.c).top_c, rep.nodes));
  const Index knn = cfg.knn < 0 ? default_knn(n) : cfg.knn;
  rep.methods.push_back(summarize("knn", detect_knn_baseline(y_train, knn, cfg.c).top_c, rep.nodes));
  return rep;
}

Eigen::VectorXd membership_distribution(const Eigen::MatrixXd& y, Index c, int restarts, const NmfConfig& nmf,
                                        const RpcaConfig& rpca) {
  const std::vector<int> freq = two_stage_frequency(y, c, restarts, nmf, rpca);
  Eigen::VectorXd mu(y.rows());
  for (Index i = 0; i < y.rows(); ++i) mu[i] = freq[static_cast<size_t>(i)];
  return mu / mu.sum();
}

double consistency_distance(const Eigen::MatrixXd& y, const ConsistencyConfig& cfg) {
  require(cfg.fraction > 0.0 && cfg.fraction <= 1.0, "subset fraction must lie in (0, 1]");
  require(cfg.trials >= 1, "trials must be >= 1");
  const Index m = y.cols();
  const Eigen::VectorXd full = membership_distribution(y, cfg.c, cfg.restarts, cfg.nmf, cfg.rpca);
  const Index keep = std::clamp<Index>(static_cast<Index>(std::llround(cfg.fraction * static_cast<double>(m))), 1, m);

  std::vector<Index> cols(static_cast<size_t>(m));
  double total = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    Eigen::VectorXd mu;
    if (keep == m) {
      mu = full;
    } else {
      Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(t)}));
      std::iota(cols.begin(), cols.end(), Index{0});
      std::shuffle(cols.begin(), cols.end(), rng);
      std::vector<Index> pick(cols.begin(), cols.begin() + keep);
      std::sort(pick.begin(), pick.end());
      const Eigen::MatrixXd sub = y(Eigen::all, pick);
      mu = membership_distribution(sub, cfg.c, cfg.restarts, cfg.nmf, cfg.rpca);
    }
    total += (mu - full).cwiseAbs().sum();
  }
  return total / cfg.trials;
}

}  // namespace cnd
