#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cnd {

using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Proximal operators

double soft_threshold(double x, double tau);

/// Elementwise sign(x) max(|x| - tau, 0).
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau);

struct SvtResult {
  Eigen::MatrixXd value;
  double nuclear_norm = 0.0;  ///< nuclear norm of `value`
};

/// Singular value thresholding: U max(S - tau, 0) V^T.
SvtResult svt_with_norm(const Eigen::MatrixXd& m, double tau);
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

// ---------------------------------------------------------------------------
// Simplex projection

/// Euclidean projection of `row` onto {w >= 0, sum w = 1}, in place.
/// Sort-and-threshold, O(m log m).
void project_simplex(std::span<double> row, std::vector<double>& scratch);

/// Same projection by repeated mean-threshold pivoting (Michelot). Exact and
/// usually linear time; used inside the NMF loop.
void project_simplex_pivot(std::span<double> row, std::vector<double>& scratch);

/// Projects every row of `m` onto the probability simplex.
Eigen::MatrixXd project_simplex_rows(const Eigen::MatrixXd& m);

// ---------------------------------------------------------------------------
// Sparse NMF with row-simplex constraint on Z, solved by alternating
// projected gradient descent:
//   min 1/2 ||Y - B Z||_F^2 + lambda_B sum(B)   s.t. B >= 0, Z >= 0, Z 1 = 1

struct NmfConfig {
  Index k = 10;
  /// Defaults to 0.001 * m when unset.
  std::optional<double> lambda_b;
  double step_a = 0.1;
  double step_b = 0.1;
  double delta_b = 1e-8;
  double delta_z = 1e-8;
  int max_iters = 10000;
  std::uint64_t seed = 0;
  /// Called after every iteration with (t + 1, B, Z). Test hook.
  std::function<void(int, const Eigen::MatrixXd&, const Eigen::MatrixXd&)> observer;
};

struct NmfSolution {
  Eigen::MatrixXd b;  ///< n x k, nonnegative
  Eigen::MatrixXd z;  ///< k x m, rows on the simplex
  /// Objective at the initial point followed by its value after each iteration.
  std::vector<double> objective_trace;
};

/// Objective 1/2 ||Y - B Z||_F^2 + lambda_b sum(B).
double nmf_objective(const Eigen::MatrixXd& y, const Eigen::MatrixXd& b, const Eigen::MatrixXd& z,
                     double lambda_b);

/// Throws SolverError (with the iteration index) if the objective becomes
/// non-finite.
NmfSolution nmf_pgd(const Eigen::MatrixXd& y, const NmfConfig& cfg);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from the
/// all-ones vector.
double power_norm(const Eigen::MatrixXd& gram, int iters = 50);

/// Least-squares H minimizing ||Y - H Z||_F (minimum-norm if Z is rank deficient).
Eigen::MatrixXd refit_h(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z);

// ---------------------------------------------------------------------------
// Robust PCA:
//   min ||H - L - S||_F^2 + lambda_L ||L||_* + lambda_S ||vec(S)||_1
// by exact alternating minimization over S and L.

struct RpcaConfig {
  double lambda_l = 0.2;
  /// Defaults to 0.2 + 2 / sqrt(k), k = columns of H, when unset.
  std::optional<double> lambda_s;
  double tol = 1e-6;
  int max_iters = 500;
  /// Multiply both weights by max |H_ij| so they do not depend on the scale of H.
  bool relative = false;

  double resolved_lambda_s(Index k) const;
};

struct RpcaSolution {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  std::vector<double> objective_trace;  ///< starts at (L, S) = (0, 0)
  int iterations = 0;
};

double rpca_objective(const Eigen::MatrixXd& h, const Eigen::MatrixXd& l, const Eigen::MatrixXd& s,
                      double lambda_l, double lambda_s);

RpcaSolution rpca(const Eigen::MatrixXd& h, const RpcaConfig& cfg);

}  // namespace cnd
