#include "cnd/signal.hpp"

#include <cmath>

#include "cnd/error.hpp"
#include "cnd/random.hpp"

namespace cnd {

namespace {

constexpr std::uint64_t kBasisStream = 0xB0;
constexpr std::uint64_t kLatentStream = 0x20;
constexpr std::uint64_t kNoiseStream = 0x40;

Eigen::MatrixXd sparse_uniform(Index rows, Index cols, double density, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  // column-major fill keeps the draw order tied to Eigen's storage
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const bool on = unif(rng) < density;
      const double mag = lo + (hi - lo) * unif(rng);
      out(i, j) = on ? mag : 0.0;
    }
  }
  return out;
}

std::vector<Index> default_core(const Graph& g) {
  const Index c = std::min<Index>(10, g.size());
  return top_c_nodes(Eigen::VectorXd(g.spectrum().eigenvectors.col(0)), c);
}

}  // namespace

Excitation generate_excitation(Index n, Index m, const ExcitationParams& p) {
  require(n >= 1 && m >= 1, "excitation needs n, m >= 1");
  require(p.k >= 1 && p.k <= n, "excitation rank must satisfy 1 <= k <= n");
  require(p.b_density >= 0.0 && p.b_density <= 1.0, "b_density must lie in [0, 1]");
  require(p.z_density >= 0.0 && p.z_density <= 1.0, "z_density must lie in [0, 1]");
  require(p.value_lo > 0.0 && p.value_lo <= p.value_hi, "value range must be positive with lo <= hi");

  Rng basis_rng(derive_seed(p.seed, {kBasisStream}));
  Rng latent_rng(derive_seed(p.seed, {kLatentStream}));
  Excitation e;
  e.b = sparse_uniform(n, p.k, p.b_density, p.value_lo, p.value_hi, basis_rng);
  if (e.b.isZero(0.0)) e.b = sparse_uniform(n, p.k, p.b_density, p.value_lo, p.value_hi, basis_rng);
  e.z = sparse_uniform(p.k, m, p.z_density, p.value_lo, p.value_hi, latent_rng);
  e.degenerate = e.b.isZero(0.0) || e.z.isZero(0.0);
  return e;
}

SignalDataset synthesize(std::shared_ptr<const Graph> g, const GraphFilter& filter, Eigen::MatrixXd b,
                         Eigen::MatrixXd z, double sigma2, std::uint64_t noise_seed, std::vector<Index> core) {
  require(g != nullptr, "dataset needs a graph");
  require(b.rows() == g->size(), "B rows must match node count");
  require(b.cols() == z.rows(), "B columns must match Z rows");
  require(sigma2 >= 0.0, "noise variance must be nonnegative");

  SignalDataset ds;
  ds.y = apply(filter, *g, b * z);
  if (sigma2 > 0.0) {
    Rng rng(derive_seed(noise_seed, {kNoiseStream}));
    std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
    for (Index j = 0; j < ds.y.cols(); ++j)
      for (Index i = 0; i < ds.y.rows(); ++i) ds.y(i, j) += noise(rng);
  }
  if (core.empty()) core = default_core(*g);
  ds.truth = GroundTruth{std::move(b), std::move(z), std::move(g), filter, std::move(core), sigma2};
  return ds;
}

SignalDataset generate_dataset(std::shared_ptr<const Graph> g, const GraphFilter& filter,
                               const ExcitationParams& params, Index m, double sigma2, std::vector<Index> core) {
  require(g != nullptr, "dataset needs a graph");
  Excitation e = generate_excitation(g->size(), m, params);
  return synthesize(std::move(g), filter, std::move(e.b), std::move(e.z), sigma2, params.seed, std::move(core));
}

Eigen::MatrixXd opinion_steady_state(const Graph& g, const Eigen::MatrixXd& b, const Eigen::MatrixXd& z) {
  const auto& ev = g.spectrum().eigenvalues;
  const double radius = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  if (radius >= 1.0) throw InputError("opinion dynamics need spectral radius < 1 (rescale A)");
  return apply(GraphFilter::iir(1.0), g, b * z);
}

Eigen::VectorXd iterate_dynamics(const Graph& g, const Eigen::VectorXd& x, int steps) {
  require(x.size() == g.size(), "dynamics input must have one entry per node");
  require(steps >= 0, "step count must be nonnegative");
  Eigen::VectorXd s = Eigen::VectorXd::Ones(g.size());
  for (int t = 0; t < steps; ++t) s = x + g.adjacency() * s;
  return s;
}

}  // namespace cnd
