#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cnd/graph.hpp"

namespace cnd {

/// h(lambda) = sum_t coeffs[t] lambda^t
struct Polynomial {
  std::vector<double> coeffs;
};

/// h(lambda) = 1 / (1 - c lambda)
struct Iir {
  double c = 0.0;
};

/// h(lambda) = exp(alpha lambda)
struct Diffusion {
  double alpha = 0.0;
};

/// A graph filter H(A) = V h(Lambda) V^T with an optional overall gain.
class GraphFilter {
 public:
  using Kind = std::variant<Polynomial, Iir, Diffusion>;

  GraphFilter(Kind kind, double gain = 1.0);

  static GraphFilter polynomial(std::vector<double> coeffs, double gain = 1.0);
  static GraphFilter iir(double c, double gain = 1.0);
  static GraphFilter diffusion(double alpha, double gain = 1.0);

  /// Parses "iir:C", "diffusion:A" or "poly:h0,h1,...".
  static GraphFilter parse(const std::string& spec);
  std::string to_string() const;

  const Kind& kind() const { return kind_; }
  double gain() const { return gain_; }

  double response(double lambda) const;
  Eigen::VectorXd responses(const Eigen::VectorXd& eigenvalues) const;

  /// Throws InputError if the filter is undefined on these eigenvalues
  /// (IIR with c * lambda >= 1 for some lambda).
  void validate(const Eigen::VectorXd& eigenvalues) const;

 private:
  Kind kind_;
  double gain_ = 1.0;
};

/// Responses on a spectrum together with the low-pass ratio
/// eta = max_{j>=2} |h_j| / |h_1|.
struct FrequencyProfile {
  Eigen::VectorXd responses;
  double eta = 0.0;

  /// Builds a profile from raw responses ordered like the descending
  /// eigenvalues. Throws InputError if |h_1| == 0.
  static FrequencyProfile from_responses(Eigen::VectorXd responses);
  bool low_pass() const { return eta < 1.0; }
};

/// H(A) X, computed spectrally.
Eigen::MatrixXd apply(const GraphFilter& filter, const Graph& g, const Eigen::MatrixXd& x);

/// The dense n x n matrix H(A).
Eigen::MatrixXd filter_matrix(const GraphFilter& filter, const Graph& g);

FrequencyProfile frequency_profile(const GraphFilter& filter, const Spectrum& spectrum);
FrequencyProfile frequency_profile(const GraphFilter& filter, const Eigen::VectorXd& eigenvalues);

/// Profile of the shifted response h(lambda) - rho. A zero passband response
/// gives eta = +infinity (the shifted filter is not low pass).
FrequencyProfile boost(const GraphFilter& filter, const Spectrum& spectrum, double rho);
FrequencyProfile boost(const GraphFilter& filter, const Eigen::VectorXd& eigenvalues, double rho);

/// (h_1 + min_{i>=2} h_i) / 2, the shift minimizing max_i |h_i / rho - 1|.
/// Assumes h convex and nonnegative on [lambda_n, lambda_1]; not checked.
double optimal_rho(const FrequencyProfile& profile);
double optimal_rho(const GraphFilter& filter, const Spectrum& spectrum);

/// max_i |h_i / rho - 1|, the operator-norm bound on ||H_rho|| / rho.
double shift_ratio(const FrequencyProfile& profile, double rho);

/// Upper bound on min_rho ||(H(A) - rho I) B|| / (rho ||B||) for convex,
/// nonnegative responses:
///   (1 - eta + d) / (1 + eta - d),  d = (max(h_2, h_n) - h_min) / h_1.
/// Throws InputError if the denominator is not positive.
double sparse_ratio_bound(const FrequencyProfile& profile);

/// Terms of the PCA error bound for the top left singular vector of H(A) B.
struct PcaBound {
  double value = 0.0;           ///< sqrt(2) eta ||V_{n-1}^T B q1|| / |v1^T B q1|
  double eta = 0.0;
  double leakage = 0.0;         ///< ||V_{n-1}^T B q1||
  double alignment = 0.0;       ///< |v1^T B q1|
  Eigen::VectorXd q1;           ///< top right singular vector of H(A) B
  Eigen::VectorXd top_left;     ///< top left singular vector of H(A) B, aligned with c_eig
};

/// Throws SolverError when |v1^T B q1| < 1e-12.
PcaBound pca_error_bound(const Graph& g, const GraphFilter& filter, const Eigen::MatrixXd& b);

}  // namespace cnd
