#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "cnd/graph.hpp"
#include "cnd/random.hpp"

namespace cnd::test {

inline Eigen::MatrixXd uniform_matrix(Index rows, Index cols, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Eigen::MatrixXd sparse_nonneg(Index rows, Index cols, double density, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      if (u(rng) < density) m(i, j) = 0.1 + 0.9 * u(rng);
  return m;
}

/// Random symmetric 0/1 adjacency with edge probability p (may be disconnected).
inline Eigen::MatrixXd random_adjacency(Index n, double p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (u(rng) < p) a(i, j) = a(j, i) = 1.0;
  return a;
}

inline Eigen::MatrixXd random_orthogonal(Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

/// Dominant eigenvector by plain power iteration on A + shift I.
inline Eigen::VectorXd power_iteration(const Eigen::MatrixXd& a, int iters = 20000) {
  const double shift = a.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::MatrixXd m = a + shift * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows()).normalized();
  for (int t = 0; t < iters; ++t) v = (m * v).normalized();
  return v;
}

inline Eigen::MatrixXd star(Index n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 1; i < n; ++i) a(0, i) = a(i, 0) = 1.0;
  return a;
}

inline Eigen::MatrixXd complete(Index n) {
  return Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
}

}  // namespace cnd::test
