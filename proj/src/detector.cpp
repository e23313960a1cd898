#include "cnd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cnd/error.hpp"
#include "cnd/random.hpp"

namespace cnd {

DetectionResult DetectionResult::from_scores(std::string method, Eigen::VectorXd scores, Index c) {
  const double norm = scores.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw SolverError(method + ": degenerate score vector");
  DetectionResult r;
  r.method = std::move(method);
  r.scores = scores / norm;
  fix_sign(r.scores);
  r.ranking = rank_by_magnitude(r.scores);
  r.top_c = top_c_nodes(r.scores, c);
  return r;
}

Eigen::MatrixXd sample_second_moment(const Eigen::MatrixXd& y, bool center) {
  require(y.cols() >= 1, "need at least one sample");
  const double inv_m = 1.0 / static_cast<double>(y.cols());
  if (center) {
    const Eigen::MatrixXd yc = y.colwise() - y.rowwise().mean();
    return inv_m * yc * yc.transpose();
  }
  Eigen::MatrixXd c(y.rows(), y.rows());
  c.noalias() = inv_m * y * y.transpose();
  return c;
}

Eigen::VectorXd moment_spectrum(const Eigen::MatrixXd& y, bool center) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample_second_moment(y, center), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("eigensolver failed on sample second moment");
  return es.eigenvalues().reverse();
}

Eigen::VectorXd top_left_singular_vector(const Eigen::MatrixXd& m) {
  require(m.size() > 0, "empty matrix has no singular vectors");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw SolverError("SVD failed");
  if (!(svd.singularValues()[0] > 0.0)) throw SolverError("top singular vector of a zero matrix is undefined");
  Eigen::VectorXd u = svd.matrixU().col(0);
  fix_sign(u);
  return u;
}

DetectionResult detect_pca(const Eigen::MatrixXd& y, Index c, const PcaOptions& opts) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample_second_moment(y, opts.center));
  if (es.info() != Eigen::Success) throw SolverError("pca: eigensolver failed");
  return DetectionResult::from_scores("pca", es.eigenvectors().col(y.rows() - 1), c);
}

DetectionResult detect_rpca_semiblind(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z, const RpcaConfig& cfg,
                                      Index c) {
  require(z.cols() == y.cols(), "rpca: Z must have one column per sample");
  const Eigen::MatrixXd h = refit_h(y, z);
  const RpcaSolution sol = rpca(h, cfg);
  return DetectionResult::from_scores("rpca", top_left_singular_vector(sol.low_rank), c);
}

namespace {

Eigen::VectorXd two_stage_scores(const Eigen::MatrixXd& y, const NmfConfig& nmf_cfg, const RpcaConfig& rpca_cfg,
                                 TwoStageTrace* trace) {
  NmfSolution nmf = nmf_pgd(y, nmf_cfg);
  Eigen::MatrixXd h = refit_h(y, nmf.z);
  RpcaSolution low = rpca(h, rpca_cfg);
  Eigen::VectorXd v = top_left_singular_vector(low.low_rank);
  if (trace) *trace = TwoStageTrace{std::move(nmf), std::move(h), std::move(low)};
  return v;
}

}  // namespace

DetectionResult detect_two_stage(const Eigen::MatrixXd& y, const NmfConfig& nmf_cfg, const RpcaConfig& rpca_cfg,
                                 Index c, int restarts, TwoStageTrace* trace) {
  require(restarts >= 1, "two-stage: restarts must be >= 1");
  if (restarts == 1)
    return DetectionResult::from_scores("two-stage", two_stage_scores(y, nmf_cfg, rpca_cfg, trace), c);

  std::vector<int> freq(static_cast<size_t>(y.rows()), 0);
  int failures = 0;
  std::string last_error;
  for (int r = 0; r < restarts; ++r) {
    NmfConfig cfg = nmf_cfg;
    cfg.seed = r == 0 ? nmf_cfg.seed : derive_seed(nmf_cfg.seed, {static_cast<std::uint64_t>(r)});
    try {
      const Eigen::VectorXd v = two_stage_scores(y, cfg, rpca_cfg, r == 0 ? trace : nullptr);
      for (Index i : top_c_nodes(v, c)) ++freq[static_cast<size_t>(i)];
    } catch (const SolverError& e) {
      ++failures;
      last_error = e.what();
    }
  }
  if (failures == restarts) throw SolverError("two-stage: every restart failed; last error: " + last_error);
  Eigen::VectorXd scores(y.rows());
  for (Index i = 0; i < y.rows(); ++i) scores[i] = freq[static_cast<size_t>(i)];
  DetectionResult res = DetectionResult::from_scores("two-stage", scores, c);
  res.frequency = std::move(freq);
  return res;
}

Eigen::MatrixXd row_correlation(const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd centered = y.colwise() - y.rowwise().mean();
  const Eigen::VectorXd norms = centered.rowwise().norm();
  Eigen::MatrixXd corr = centered * centered.transpose();
  for (Index i = 0; i < y.rows(); ++i) {
    for (Index j = 0; j < y.rows(); ++j) {
      const double d = norms[i] * norms[j];
      corr(i, j) = d > 0.0 ? corr(i, j) / d : 0.0;
    }
  }
  return corr;
}

Eigen::MatrixXd knn_graph(const Eigen::MatrixXd& y, Index knn) {
  const Index n = y.rows();
  require(knn >= 1, "knn must be >= 1");
  require(knn < n, "knn must be smaller than the node count");
  const Eigen::MatrixXd corr = row_correlation(y);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::vector<Index> peers;
  for (Index i = 0; i < n; ++i) {
    peers.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) peers.push_back(j);
    std::stable_sort(peers.begin(), peers.end(), [&](Index p, Index q) { return corr(i, p) > corr(i, q); });
    for (Index t = 0; t < knn; ++t) {
      const Index j = peers[static_cast<size_t>(t)];
      a(i, j) = a(j, i) = 1.0;
    }
  }
  return a;
}

DetectionResult detect_knn_baseline(const Eigen::MatrixXd& y, Index knn, Index c) {
  const Graph g = Graph::from_adjacency(knn_graph(y, knn));
  // the kNN graph may be disconnected; the leading eigenvector is still well defined
  return DetectionResult::from_scores("knn", g.spectrum().eigenvectors.col(0), c);
}

Index default_knn(Index n) { return std::max<Index>(1, static_cast<Index>(std::ceil(0.1 * static_cast<double>(n)))); }

Index estimate_rank(const Eigen::MatrixXd& y, const RankOptions& opts) {
  require(y.cols() >= 2, "rank estimation needs m >= 2");
  const Index n = y.rows();
  require(n >= 2, "rank estimation needs n >= 2");
  Eigen::VectorXd s = moment_spectrum(y, opts.center);
  const Index hi = std::min(opts.k_max < 0 ? n / 2 : opts.k_max, n - 1);
  const Index lo = std::max<Index>(1, opts.k_min);
  require(lo <= hi, "rank estimation: empty search range");
  const double floor = std::max(s[0] * static_cast<double>(n) * std::numeric_limits<double>::epsilon(),
                                std::numeric_limits<double>::min());
  s = s.cwiseMax(floor);
  Index best = lo;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (Index i = lo; i <= hi; ++i) {
    const double gap = std::log(s[i - 1] / s[i]);
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

double moment_ratio(const Eigen::MatrixXd& y, bool center) {
  require(y.rows() >= 2, "moment ratio needs n >= 2");
  const Eigen::VectorXd s = moment_spectrum(y, center);
  if (!(s[0] > 0.0)) throw InputError("moment ratio undefined for all-zero data");
  return std::max(s[1], 0.0) / s[0];
}

FilterStrength classify_filter_strength(const Eigen::MatrixXd& y, double tau, bool center) {
  require(y.cols() >= 2, "filter classification needs m >= 2");
  return moment_ratio(y, center) < tau ? FilterStrength::Strong : FilterStrength::General;
}

const char* to_string(FilterStrength s) { return s == FilterStrength::Strong ? "strong" : "general"; }

}  // namespace cnd
