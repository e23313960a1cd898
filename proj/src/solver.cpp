#include "cnd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "cnd/error.hpp"
#include "cnd/random.hpp"

namespace cnd {

double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau) {
  require(tau >= 0.0, "soft threshold needs tau >= 0");
  return m.unaryExpr([tau](double x) { return soft_threshold(x, tau); });
}

SvtResult svt_with_norm(const Eigen::MatrixXd& m, double tau) {
  require(tau >= 0.0, "singular value threshold needs tau >= 0");
  SvtResult out;
  if (m.size() == 0) {
    out.value = m;
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw SolverError("SVD failed in singular value thresholding");
  Eigen::VectorXd s = (svd.singularValues().array() - tau).max(0.0);
  Index r = 0;
  while (r < s.size() && s[r] > 0.0) ++r;
  out.nuclear_norm = s.head(r).sum();
  out.value = svd.matrixU().leftCols(r) * s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
  if (r == 0) out.value = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  return out;
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  if (tau == 0.0) return m;
  return svt_with_norm(m, tau).value;
}

void project_simplex(std::span<double> row, std::vector<double>& u) {
  if (row.empty()) return;
  u.assign(row.begin(), row.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (double& x : row) x = std::max(x - theta, 0.0);
}

void project_simplex_pivot(std::span<double> row, std::vector<double>& active) {
  if (row.empty()) return;
  active.assign(row.begin(), row.end());
  double sum = std::accumulate(active.begin(), active.end(), 0.0);
  size_t count = active.size();
  double theta = (sum - 1.0) / static_cast<double>(count);
  for (;;) {
    size_t kept = 0;
    double kept_sum = 0.0;
    for (size_t j = 0; j < count; ++j) {
      if (active[j] > theta) {
        kept_sum += active[j];
        active[kept++] = active[j];
      }
    }
    if (kept == count) break;
    count = kept;
    theta = (kept_sum - 1.0) / static_cast<double>(count);
  }
  for (double& x : row) x = std::max(x - theta, 0.0);
}

Eigen::MatrixXd project_simplex_rows(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  std::vector<double> row(static_cast<size_t>(m.cols()));
  std::vector<double> scratch;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<size_t>(j)] = m(i, j);
    project_simplex(row, scratch);
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = row[static_cast<size_t>(j)];
  }
  return out;
}

double nmf_objective(const Eigen::MatrixXd& y, const Eigen::MatrixXd& b, const Eigen::MatrixXd& z,
                     double lambda_b) {
  return 0.5 * (y - b * z).squaredNorm() + lambda_b * b.sum();
}

double power_norm(const Eigen::MatrixXd& gram, int iters) {
  if (gram.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.rows()).normalized();
  Eigen::VectorXd w(gram.rows());
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    w.noalias() = gram * v;
    est = w.norm();
    if (est == 0.0) return 0.0;
    v = w / est;
  }
  return est;
}

namespace {

constexpr std::uint64_t kNmfInitStream = 0x1A;

void project_rows_inplace(Eigen::MatrixXd& z, std::vector<double>& row, std::vector<double>& scratch) {
  row.resize(static_cast<size_t>(z.cols()));
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) row[static_cast<size_t>(j)] = z(i, j);
    project_simplex_pivot(row, scratch);
    for (Index j = 0; j < z.cols(); ++j) z(i, j) = row[static_cast<size_t>(j)];
  }
}

// max{delta, a / L}; a zero Lipschitz constant means the block gradient is
// identically zero, so any finite step leaves the iterate unchanged.
double step_size(double delta, double numerator, double lipschitz) {
  if (!(lipschitz > 0.0)) return delta;
  return std::max(delta, numerator / lipschitz);
}

}  // namespace

NmfSolution nmf_pgd(const Eigen::MatrixXd& y, const NmfConfig& cfg) {
  const Index n = y.rows();
  const Index m = y.cols();
  const Index k = cfg.k;
  require(n >= 1 && m >= 1, "NMF needs a non-empty data matrix");
  require(y.allFinite(), "NMF data contains non-finite values");
  require(k >= 1, "NMF inner dimension must be >= 1");
  require(cfg.step_a > 0 && cfg.step_a <= 1 && cfg.step_b > 0 && cfg.step_b <= 1,
          "NMF step parameters must lie in (0, 1]");
  require(cfg.delta_b > 0 && cfg.delta_z > 0, "NMF step floors must be positive");
  require(cfg.max_iters >= 1, "NMF needs at least one iteration");
  const double lambda = cfg.lambda_b.value_or(0.001 * static_cast<double>(m));
  require(lambda >= 0.0, "lambda_B must be nonnegative");

  Rng rng(derive_seed(cfg.seed, {kNmfInitStream}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  NmfSolution sol;
  Eigen::MatrixXd& b = sol.b;
  Eigen::MatrixXd& z = sol.z;
  b.resize(n, k);
  z.resize(k, m);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) b(i, j) = unif(rng);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < k; ++i) z(i, j) = unif(rng);
  for (Index i = 0; i < k; ++i) {
    const double s = z.row(i).sum();
    if (s > 0.0)
      z.row(i) /= s;
    else
      z.row(i).setConstant(1.0 / static_cast<double>(m));
  }

  Eigen::MatrixXd gram_z(k, k), gram_b(k, k);
  Eigen::MatrixXd y_zt(n, k), grad_b(n, k);
  Eigen::MatrixXd bt_y(k, m), grad_z(k, m);
  std::vector<double> row, scratch;
  const double half_y2 = 0.5 * y.squaredNorm();

  sol.objective_trace.reserve(static_cast<size_t>(cfg.max_iters) + 1);
  sol.objective_trace.push_back(nmf_objective(y, b, z, lambda));
  gram_z.noalias() = z * z.transpose();

  for (int t = 0; t < cfg.max_iters; ++t) {
    // B block: gradient B Z Z^T - Y Z^T + lambda 1
    y_zt.noalias() = y * z.transpose();
    const double alpha = step_size(cfg.delta_b, cfg.step_a, power_norm(gram_z));
    grad_b.noalias() = b * gram_z;
    grad_b -= y_zt;
    grad_b.array() += lambda;
    b = (b - alpha * grad_b).cwiseMax(0.0);

    // Z block at the new B: gradient B^T B Z - B^T Y
    gram_b.noalias() = b.transpose() * b;
    bt_y.noalias() = b.transpose() * y;
    const double beta = step_size(cfg.delta_z, cfg.step_b, power_norm(gram_b));
    grad_z.noalias() = gram_b * z;
    grad_z -= bt_y;
    z -= beta * grad_z;
    project_rows_inplace(z, row, scratch);
    gram_z.noalias() = z * z.transpose();

    // 1/2 ||Y - BZ||^2 expanded so the Gram matrices above are reused
    const double f = half_y2 - (bt_y.array() * z.array()).sum() + 0.5 * (gram_b.array() * gram_z.array()).sum() +
                     lambda * b.sum();
    if (!std::isfinite(f))
      throw SolverError("NMF objective became non-finite at iteration " + std::to_string(t + 1) +
                        " (step parameters too large?)");
    sol.objective_trace.push_back(f);
    if (cfg.observer) cfg.observer(t + 1, b, z);
  }
  return sol;
}

Eigen::MatrixXd refit_h(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) {
  require(y.cols() == z.cols(), "refit: Y and Z must have the same number of columns");
  // min ||Y - H Z|| <=> min ||Z^T H^T - Y^T||; COD gives the minimum-norm solution
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(z.transpose());
  return cod.solve(y.transpose()).transpose();
}

double RpcaConfig::resolved_lambda_s(Index k) const {
  return lambda_s.value_or(0.2 + 2.0 / std::sqrt(static_cast<double>(std::max<Index>(k, 1))));
}

double rpca_objective(const Eigen::MatrixXd& h, const Eigen::MatrixXd& l, const Eigen::MatrixXd& s,
                      double lambda_l, double lambda_s) {
  double nuclear = 0.0;
  if (l.size() > 0) nuclear = Eigen::BDCSVD<Eigen::MatrixXd>(l).singularValues().sum();
  return (h - l - s).squaredNorm() + lambda_l * nuclear + lambda_s * s.cwiseAbs().sum();
}

RpcaSolution rpca(const Eigen::MatrixXd& h, const RpcaConfig& cfg) {
  require(cfg.lambda_l > 0 && cfg.resolved_lambda_s(h.cols()) > 0, "RPCA weights must be positive");
  require(cfg.max_iters >= 1, "RPCA needs at least one iteration");
  require(h.allFinite(), "RPCA input contains non-finite values");
  const double scale = cfg.relative && h.size() > 0 ? h.cwiseAbs().maxCoeff() : 1.0;
  const double lambda_l = scale * cfg.lambda_l;
  const double lambda_s = scale * cfg.resolved_lambda_s(h.cols());

  RpcaSolution sol;
  sol.low_rank = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  sol.sparse = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  double prev = h.squaredNorm();
  sol.objective_trace.push_back(prev);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    // each block has a closed-form minimizer given the other
    sol.sparse = soft_threshold(h - sol.low_rank, 0.5 * lambda_s);
    SvtResult lr = svt_with_norm(h - sol.sparse, 0.5 * lambda_l);
    sol.low_rank = std::move(lr.value);
    const double f = (h - sol.low_rank - sol.sparse).squaredNorm() + lambda_l * lr.nuclear_norm +
                     lambda_s * sol.sparse.cwiseAbs().sum();
    if (!std::isfinite(f)) throw SolverError("RPCA objective became non-finite");
    sol.objective_trace.push_back(f);
    sol.iterations = it;
    if (std::abs(prev - f) <= cfg.tol * std::max(std::abs(prev), std::numeric_limits<double>::min())) break;
    prev = f;
  }
  return sol;
}

}  // namespace cnd
