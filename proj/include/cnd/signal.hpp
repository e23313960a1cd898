#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cnd/filter.hpp"
#include "cnd/graph.hpp"

namespace cnd {

struct ExcitationParams {
  Index k = 10;
  double b_density = 0.1;
  double z_density = 0.6;
  double value_lo = 0.1;
  double value_hi = 1.0;
  std::uint64_t seed = 0;
};

struct Excitation {
  Eigen::MatrixXd b;  ///< n x k basis
  Eigen::MatrixXd z;  ///< k x m latent parameters
  /// Set when B or Z came out entirely zero (after one regeneration attempt for B).
  bool degenerate = false;
};

/// B_ij = Bernoulli(b_density) * U[lo, hi], Z likewise with z_density.
/// All-zero B is redrawn once before being flagged.
Excitation generate_excitation(Index n, Index m, const ExcitationParams& params);

struct GroundTruth {
  Eigen::MatrixXd b;
  Eigen::MatrixXd z;
  std::shared_ptr<const Graph> graph;
  GraphFilter filter;
  std::vector<Index> core;  ///< designated central nodes V_c, ascending
  double sigma2 = 0.0;
};

struct SignalDataset {
  Eigen::MatrixXd y;  ///< n x m, one column per sample
  std::optional<GroundTruth> truth;

  Index nodes() const { return y.rows(); }
  Index samples() const { return y.cols(); }
};

/// Y = H(A) B Z + W with W i.i.d. N(0, sigma2). The noise stream is seeded
/// from params.seed so that (graph, params, m, sigma2) fixes Y. An empty
/// `core` defaults to the top-10 eigencentrality nodes (or all nodes if n < 10).
SignalDataset generate_dataset(std::shared_ptr<const Graph> g, const GraphFilter& filter,
                               const ExcitationParams& params, Index m, double sigma2,
                               std::vector<Index> core = {});

/// Same model from explicit factors.
SignalDataset synthesize(std::shared_ptr<const Graph> g, const GraphFilter& filter, Eigen::MatrixXd b,
                         Eigen::MatrixXd z, double sigma2, std::uint64_t noise_seed,
                         std::vector<Index> core = {});

/// Steady state of DeGroot dynamics with stubborn agents: (I - A)^{-1} B Z.
/// Throws InputError unless the spectral radius of A is below one.
Eigen::MatrixXd opinion_steady_state(const Graph& g, const Eigen::MatrixXd& b, const Eigen::MatrixXd& z);

/// Runs s_{t+1} = x + A s_t from s_0 = 1 for `steps` steps and returns s_T.
Eigen::VectorXd iterate_dynamics(const Graph& g, const Eigen::VectorXd& x, int steps);

}  // namespace cnd
