#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnd/detector.hpp"
#include "cnd/filter.hpp"
#include "cnd/graph.hpp"
#include "cnd/signal.hpp"
#include "cnd/solver.hpp"

namespace cnd {

// ---------------------------------------------------------------------------
// Metrics

/// Fraction of true central nodes missed: 1 - |truth ∩ detected| / c.
/// Both sets must hold exactly c distinct nodes.
double error_rate(const std::vector<Index>& truth, const std::vector<Index>& detected, Index c);

/// <x, g> / (||x|| ||g||). Throws InputError on length mismatch or a zero vector.
double correlation_score(const Eigen::VectorXd& x, const Eigen::VectorXd& g);

// ---------------------------------------------------------------------------
// Monte-Carlo sweeps

enum class Method { Pca, TwoStage, Rpca, Knn };

Method parse_method(const std::string& name);
const char* to_string(Method m);

enum class GraphKind { Cp, Ba, File };

struct GraphSpec {
  GraphKind kind = GraphKind::Cp;
  CpParams cp;
  BaParams ba;
  std::filesystem::path file;
};

enum class SweepVar { K, P1, N, M };

/// Which node set a trial scores against. Core uses the CP core block when its
/// size equals c; Eigencentrality always takes the top-c of c_eig.
enum class TruthKind { Core, Eigencentrality };

TruthKind parse_truth_kind(const std::string& name);
const char* to_string(TruthKind t);

SweepVar parse_sweep_var(const std::string& name);
const char* to_string(SweepVar v);

struct ExperimentConfig {
  GraphSpec graph;
  GraphFilter filter = GraphFilter::iir(0.02);
  ExcitationParams excitation;  ///< seed is ignored; trials derive their own
  Index m = 200;
  double sigma2 = 0.01;
  Index c = 10;
  TruthKind truth = TruthKind::Core;
  SweepVar sweep = SweepVar::K;
  std::vector<double> values;
  std::vector<Method> detectors = {Method::Pca, Method::TwoStage, Method::Rpca, Method::Knn};
  int trials = 100;
  std::uint64_t base_seed = 0;
  NmfConfig nmf;      ///< k and seed are set per trial
  RpcaConfig rpca;
  Index knn = -1;     ///< ceil(0.1 n) when negative
  std::filesystem::path output;

  /// Throws InputError when the sweep is empty, trials < 1, or the sweep
  /// variable does not apply to the graph kind.
  void validate() const;
};

struct BenchRow {
  double value = 0.0;
  Method method = Method::Pca;
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;    ///< successful trials
  int failures = 0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;  ///< ordered by sweep value, then detector

  const BenchRow& at(double value, Method method) const;
};

/// Everything one trial produces, before aggregation.
struct TrialOutcome {
  std::vector<double> errors;   ///< one per detector; NaN on failure
  std::vector<double> seconds;
};

/// Seed for trial `trial` at sweep value `value`.
std::uint64_t trial_seed(std::uint64_t base, double value, int trial);

/// Runs one trial of the sweep at `value`.
TrialOutcome run_trial(const ExperimentConfig& cfg, double value, int trial);

/// Runs every (value, trial) pair, fanning out over `workers` threads
/// (CND_WORKERS or hardware concurrency when 0). Aggregates are independent
/// of scheduling. `progress` is called after each finished trial.
BenchResult run_sweep(const ExperimentConfig& cfg, unsigned workers = 0,
                      const std::function<void(int done, int total)>& progress = {});

unsigned default_workers();

void write_bench_csv(const BenchResult& result, const ExperimentConfig& cfg, const std::filesystem::path& path);

/// Parses a key = value config file. Lines starting with '#' are comments;
/// `[section]` headers are accepted and ignored. Lists are comma separated,
/// optionally wrapped in brackets.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Real-data protocol

struct EvalConfig {
  double split = 0.8;
  Index k = 10;
  Index c = 10;
  int restarts = 100;
  bool shift_min = false;
  NmfConfig nmf;   ///< k is overridden
  RpcaConfig rpca;
  Index knn = -1;
};

struct NodeScore {
  Index node = 0;
  int frequency = 0;  ///< two-stage top-C count over restarts
  double corr = 0.0;  ///< test-block correlation with g; 0 for an all-zero row
};

struct MethodSummary {
  std::string method;
  std::vector<Index> top_c;
  double mean_corr = 0.0;
  double std_corr = 0.0;
};

struct EvalReport {
  std::vector<NodeScore> nodes;
  std::vector<MethodSummary> methods;
  Index train_columns = 0;
};

/// Subtracts the global minimum so every entry is nonnegative.
Eigen::MatrixXd shift_to_nonnegative(const Eigen::MatrixXd& y);

/// Fits two-stage (with restarts), PCA and kNN on the first `split` fraction of
/// columns and scores nodes against `g` on the remaining columns.
EvalReport eval_real(const Eigen::MatrixXd& y, const Eigen::VectorXd& g, const EvalConfig& cfg);

/// Top-C membership frequency of the two-stage detector over restarts,
/// normalized to sum to one.
Eigen::VectorXd membership_distribution(const Eigen::MatrixXd& y, Index c, int restarts, const NmfConfig& nmf,
                                        const RpcaConfig& rpca);

struct ConsistencyConfig {
  double fraction = 1.0;
  int trials = 100;
  int restarts = 100;
  Index c = 10;
  NmfConfig nmf;
  RpcaConfig rpca;
  std::uint64_t seed = 0;
};

/// Mean l1 distance between membership distributions fitted on random column
/// subsets and on all columns. Subsets keep the original column order.
double consistency_distance(const Eigen::MatrixXd& y, const ConsistencyConfig& cfg);

}  // namespace cnd
