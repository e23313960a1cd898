#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnd/graph.hpp"
#include "cnd/solver.hpp"

namespace cnd {

/// Output of every detector: a unit-norm, sign-fixed centrality estimate,
/// the full ranking by |score| and the top-C node set (ascending indices).
struct DetectionResult {
  std::string method;
  Eigen::VectorXd scores;
  std::vector<Index> ranking;
  std::vector<Index> top_c;
  /// Top-C membership counts across restarts (two-stage with restarts > 1 only).
  std::vector<int> frequency;

  /// Normalizes and sign-fixes `scores`, then ranks. Throws SolverError on a
  /// zero or non-finite score vector.
  static DetectionResult from_scores(std::string method, Eigen::VectorXd scores, Index c);
};

/// Second-moment matrix (1/m) Y Y^T; with `center` the row means are removed first.
Eigen::MatrixXd sample_second_moment(const Eigen::MatrixXd& y, bool center = false);

/// Eigenvalues of the sample second moment, descending.
Eigen::VectorXd moment_spectrum(const Eigen::MatrixXd& y, bool center = false);

/// Top left singular vector, sign-fixed. Throws SolverError on a zero matrix.
Eigen::VectorXd top_left_singular_vector(const Eigen::MatrixXd& m);

struct PcaOptions {
  bool center = false;
};

/// Top eigenvector of the (uncentered by default) sample second moment.
DetectionResult detect_pca(const Eigen::MatrixXd& y, Index c, const PcaOptions& opts = {});

/// Known latent parameters: H = Y Z^+, RPCA on H, top left singular vector of L.
DetectionResult detect_rpca_semiblind(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z, const RpcaConfig& cfg,
                                      Index c);

/// Intermediate products of one two-stage run.
struct TwoStageTrace {
  NmfSolution nmf;
  Eigen::MatrixXd h_hat;
  RpcaSolution rpca;
};

/// Fully blind: NMF for Z, least-squares H, RPCA, top left singular vector of
/// L. With restarts > 1, NMF is rerun with seeds derived from nmf_cfg.seed and
/// nodes are ranked by how often they land in the top-C (ties by index).
DetectionResult detect_two_stage(const Eigen::MatrixXd& y, const NmfConfig& nmf_cfg, const RpcaConfig& rpca_cfg,
                                 Index c, int restarts = 1, TwoStageTrace* trace = nullptr);

/// 0/1 graph linking each node to its `knn` highest Pearson-correlation peers,
/// symmetrized by OR. Zero-variance rows have correlation 0 with everything.
Eigen::MatrixXd knn_graph(const Eigen::MatrixXd& y, Index knn);
Eigen::MatrixXd row_correlation(const Eigen::MatrixXd& y);

DetectionResult detect_knn_baseline(const Eigen::MatrixXd& y, Index knn, Index c);

/// ceil(0.1 n), at least 1.
Index default_knn(Index n);

struct RankOptions {
  Index k_min = 2;
  Index k_max = -1;  ///< n / 2 when negative
  bool center = false;
};

/// Position of the largest log-gap log(s_i / s_{i+1}) in the sample
/// second-moment spectrum, i in [k_min, k_max]. Eigenvalues are floored at
/// s_1 * n * machine-eps so numerical null directions do not form gaps.
Index estimate_rank(const Eigen::MatrixXd& y, const RankOptions& opts = {});

enum class FilterStrength { Strong, General };

/// Ratio lambda_2 / lambda_1 of the sample second moment.
double moment_ratio(const Eigen::MatrixXd& y, bool center = false);

/// Strong iff the sample second moment is close to rank one: ratio < tau.
FilterStrength classify_filter_strength(const Eigen::MatrixXd& y, double tau = 0.25, bool center = false);

const char* to_string(FilterStrength s);

}  // namespace cnd
