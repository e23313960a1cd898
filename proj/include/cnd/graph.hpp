#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cnd {

using Index = Eigen::Index;

/// Eigen-decomposition of a symmetric matrix, eigenvalues sorted descending.
/// Each eigenvector is sign-fixed so that its largest-magnitude entry is
/// nonnegative (first such entry on ties).
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  static Spectrum of(const Eigen::MatrixXd& symmetric);
};

/// Flips v in place so its largest-magnitude entry is nonnegative.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

/// Undirected weighted graph on nodes 0..n-1, stored as a dense symmetric
/// adjacency with zero diagonal. Immutable; the spectrum is computed once at
/// construction.
class Graph {
 public:
  /// Validates symmetry (exact), nonnegativity and a zero diagonal.
  /// Throws InputError otherwise. Connectivity is recorded, not enforced.
  static Graph from_adjacency(Eigen::MatrixXd adjacency);

  Index size() const { return adjacency_.rows(); }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  const Spectrum& spectrum() const { return spectrum_; }
  bool connected() const { return connected_; }
  Index edge_count() const;
  Eigen::VectorXd degrees() const { return adjacency_.rowwise().sum(); }

 private:
  Graph(Eigen::MatrixXd adjacency, Spectrum spectrum, bool connected);

  Eigen::MatrixXd adjacency_;
  Spectrum spectrum_;
  bool connected_ = false;
};

bool is_connected(const Eigen::MatrixXd& adjacency);

struct CpParams {
  Index n = 100;
  Index core_size = 10;
  double p1 = 0.4;
  double p2 = 0.05;
  std::uint64_t seed = 0;
};

struct BaParams {
  Index n = 100;
  Index m_attach = 10;
  std::uint64_t seed = 0;
};

/// Two-block core-periphery stochastic block model. Nodes 0..core_size-1 form
/// the core. Core-core edges appear with probability p1, core-periphery with
/// min(p1, 4 p2), periphery-periphery with p2. Disconnected draws are
/// discarded; throws InputError after 100 attempts.
Graph generate_cp(const CpParams& params);

/// Preferential attachment. Starts from a clique on nodes 0..m_attach-1;
/// every later node links to m_attach distinct earlier nodes drawn without
/// replacement with probability proportional to current degree.
Graph generate_ba(const BaParams& params);

/// Unit-norm Perron vector of the adjacency. Throws InputError if the graph
/// is disconnected.
Eigen::VectorXd eigencentrality(const Graph& g);

/// Node indices sorted by descending |score|, ties by ascending index.
std::vector<Index> rank_by_magnitude(std::span<const double> scores);
std::vector<Index> rank_by_magnitude(const Eigen::VectorXd& scores);

/// The c nodes with the largest |score|, returned in ascending index order.
std::vector<Index> top_c_nodes(std::span<const double> scores, Index c);
std::vector<Index> top_c_nodes(const Eigen::VectorXd& scores, Index c);

/// lambda_2 / lambda_1 of the adjacency (signed lambda_2).
double spectral_gap(const Graph& g);

// Serialization. Edge list: first line "n=<count>", then "i j w" per edge
// with i < j, 0-indexed.
void write_edge_list(const Graph& g, const std::filesystem::path& path);
Graph read_edge_list(const std::filesystem::path& path);
void write_adjacency_csv(const Graph& g, const std::filesystem::path& path);
Graph read_adjacency_csv(const std::filesystem::path& path);

/// Reads a graph file, dispatching on extension (.csv dense, otherwise edge list).
Graph read_graph(const std::filesystem::path& path);

}  // namespace cnd
