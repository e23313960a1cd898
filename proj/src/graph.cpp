#include "cnd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include "cnd/error.hpp"
#include "cnd/io.hpp"
#include "cnd/random.hpp"

namespace cnd {

namespace {

constexpr int kMaxConnectAttempts = 100;
constexpr std::uint64_t kCpStream = 0xC0;
constexpr std::uint64_t kBaStream = 0xBA;

}  // namespace

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    // strict > keeps the first index among equal magnitudes
    if (std::abs(v[i]) > best + 1e-12 * std::max(1.0, best)) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0) v = -v;
}

Spectrum Spectrum::of(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  if (es.info() != Eigen::Success) throw SolverError("symmetric eigensolver failed");
  const Index n = symmetric.rows();
  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (Index j = 0; j < n; ++j) fix_sign(s.eigenvectors.col(j));
  return s;
}

bool is_connected(const Eigen::MatrixXd& adjacency) {
  const Index n = adjacency.rows();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::queue<Index> q;
  q.push(0);
  seen[0] = 1;
  Index visited = 1;
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (Index v = 0; v < n; ++v) {
      if (!seen[static_cast<size_t>(v)] && adjacency(u, v) > 0) {
        seen[static_cast<size_t>(v)] = 1;
        ++visited;
        q.push(v);
      }
    }
  }
  return visited == n;
}

Graph::Graph(Eigen::MatrixXd adjacency, Spectrum spectrum, bool connected)
    : adjacency_(std::move(adjacency)), spectrum_(std::move(spectrum)), connected_(connected) {}

Graph Graph::from_adjacency(Eigen::MatrixXd adjacency) {
  const Index n = adjacency.rows();
  require(n > 0, "adjacency must be non-empty");
  require(adjacency.cols() == n, "adjacency must be square");
  require(adjacency.allFinite(), "adjacency has non-finite entries");
  for (Index i = 0; i < n; ++i) {
    require(adjacency(i, i) == 0.0, "adjacency diagonal must be zero (node " + std::to_string(i) + ")");
    for (Index j = i + 1; j < n; ++j) {
      require(adjacency(i, j) == adjacency(j, i),
              "adjacency not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      require(adjacency(i, j) >= 0.0, "adjacency has negative weight");
    }
  }
  const bool conn = is_connected(adjacency);
  Spectrum spec = Spectrum::of(adjacency);
  return Graph(std::move(adjacency), std::move(spec), conn);
}

Index Graph::edge_count() const {
  Index count = 0;
  for (Index j = 0; j < size(); ++j)
    for (Index i = 0; i < j; ++i)
      if (adjacency_(i, j) > 0) ++count;
  return count;
}

Graph generate_cp(const CpParams& p) {
  require(p.n >= 2, "CP graph needs n >= 2");
  require(p.core_size >= 1 && p.core_size < p.n, "CP core size must satisfy 1 <= core < n");
  require(p.p2 > 0 && p.p2 <= p.p1 && p.p1 <= 1.0, "CP probabilities must satisfy 0 < p2 <= p1 <= 1");

  Rng rng(derive_seed(p.seed, {kCpStream}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double p_cross = std::min(p.p1, 4.0 * p.p2);

  for (int attempt = 0; attempt < kMaxConnectAttempts; ++attempt) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p.n, p.n);
    for (Index j = 1; j < p.n; ++j) {
      for (Index i = 0; i < j; ++i) {
        const bool core_i = i < p.core_size;
        const bool core_j = j < p.core_size;
        const double prob = (core_i && core_j) ? p.p1 : (core_i || core_j) ? p_cross : p.p2;
        if (unif(rng) < prob) a(i, j) = a(j, i) = 1.0;
      }
    }
    if (is_connected(a)) return Graph::from_adjacency(std::move(a));
  }
  throw InputError("CP generator: no connected sample in " + std::to_string(kMaxConnectAttempts) +
                   " attempts (parameters too sparse)");
}

Graph generate_ba(const BaParams& p) {
  require(p.m_attach >= 1 && p.m_attach < p.n, "BA requires 1 <= m_attach < n");
  Rng rng(derive_seed(p.seed, {kBaStream}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p.n, p.n);
  std::vector<double> degree(static_cast<size_t>(p.n), 0.0);
  for (Index j = 1; j < p.m_attach; ++j) {
    for (Index i = 0; i < j; ++i) {
      a(i, j) = a(j, i) = 1.0;
      degree[static_cast<size_t>(i)] += 1.0;
      degree[static_cast<size_t>(j)] += 1.0;
    }
  }

  std::vector<double> weight;
  std::vector<Index> targets;
  for (Index v = p.m_attach; v < p.n; ++v) {
    weight.assign(degree.begin(), degree.begin() + v);
    targets.clear();
    for (Index draw = 0; draw < p.m_attach; ++draw) {
      double total = std::accumulate(weight.begin(), weight.end(), 0.0);
      Index pick = -1;
      if (total <= 0.0) {
        // all remaining candidates have degree zero (single-node seed): uniform
        std::vector<Index> open;
        for (Index u = 0; u < v; ++u)
          if (std::find(targets.begin(), targets.end(), u) == targets.end()) open.push_back(u);
        pick = open[static_cast<size_t>(unif(rng) * static_cast<double>(open.size()))];
      } else {
        const double r = unif(rng) * total;
        double acc = 0.0;
        for (Index u = 0; u < v; ++u) {
          acc += weight[static_cast<size_t>(u)];
          if (weight[static_cast<size_t>(u)] > 0 && r < acc) {
            pick = u;
            break;
          }
        }
        if (pick < 0) {  // r landed on the rounding edge; take the last open candidate
          for (Index u = v - 1; u >= 0; --u)
            if (weight[static_cast<size_t>(u)] > 0) {
              pick = u;
              break;
            }
        }
      }
      targets.push_back(pick);
      weight[static_cast<size_t>(pick)] = 0.0;
    }
    for (Index u : targets) {
      a(u, v) = a(v, u) = 1.0;
      degree[static_cast<size_t>(u)] += 1.0;
    }
    degree[static_cast<size_t>(v)] += static_cast<double>(p.m_attach);
  }
  return Graph::from_adjacency(std::move(a));
}

Eigen::VectorXd eigencentrality(const Graph& g) {
  require(g.connected(), "eigencentrality requires a connected graph");
  return g.spectrum().eigenvectors.col(0);
}

std::vector<Index> rank_by_magnitude(std::span<const double> scores) {
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(scores[static_cast<size_t>(a)]) > std::abs(scores[static_cast<size_t>(b)]);
  });
  return order;
}

std::vector<Index> rank_by_magnitude(const Eigen::VectorXd& scores) {
  return rank_by_magnitude(std::span<const double>(scores.data(), static_cast<size_t>(scores.size())));
}

std::vector<Index> top_c_nodes(std::span<const double> scores, Index c) {
  require(c >= 1 && c <= static_cast<Index>(scores.size()), "top-c requires 1 <= c <= n");
  auto order = rank_by_magnitude(scores);
  order.resize(static_cast<size_t>(c));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<Index> top_c_nodes(const Eigen::VectorXd& scores, Index c) {
  return top_c_nodes(std::span<const double>(scores.data(), static_cast<size_t>(scores.size())), c);
}

double spectral_gap(const Graph& g) {
  require(g.size() >= 2, "spectral gap needs at least two nodes");
  const auto& ev = g.spectrum().eigenvalues;
  require(ev[0] > 0, "spectral gap needs a positive leading eigenvalue");
  return ev[1] / ev[0];
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "n=" << g.size() << '\n';
  const auto& a = g.adjacency();
  for (Index i = 0; i < g.size(); ++i)
    for (Index j = i + 1; j < g.size(); ++j)
      if (a(i, j) != 0.0) out << i << ' ' << j << ' ' << a(i, j) << '\n';
}

Graph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::string line;
  Index n = -1;
  int lineno = 0;
  while (n < 0 && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("n=", 0) != 0) throw InputError(path.string() + ": expected header n=<count>");
    try {
      n = std::stol(line.substr(2));
    } catch (const std::exception&) {
      throw InputError(path.string() + ": bad node count in header");
    }
  }
  require(n > 0, path.string() + ": missing or empty header");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Index i = 0, j = 0;
    double w = 1.0;
    if (!(ss >> i >> j)) throw InputError(path.string() + ":" + std::to_string(lineno) + ": malformed edge");
    if (!(ss >> w)) w = 1.0;
    require(i >= 0 && j >= 0 && i < n && j < n && i != j,
            path.string() + ":" + std::to_string(lineno) + ": edge endpoint out of range");
    a(i, j) = a(j, i) = w;
  }
  return Graph::from_adjacency(std::move(a));
}

void write_adjacency_csv(const Graph& g, const std::filesystem::path& path) {
  write_matrix_csv(g.adjacency(), path);
}

Graph read_adjacency_csv(const std::filesystem::path& path) {
  return Graph::from_adjacency(read_matrix_csv(path));
}

Graph read_graph(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_adjacency_csv(path);
  return read_edge_list(path);
}

}  // namespace cnd
