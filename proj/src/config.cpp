#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cnd/error.hpp"
#include "cnd/harness.hpp"

namespace cnd {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw InputError("unterminated list: " + s);
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw InputError("'" + key + "' expects a number, got '" + v + "'");
  return x;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw InputError("'" + key + "' expects an integer, got '" + v + "'");
  return x;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  bool graph_kind_set = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string raw = trim(std::string_view(line).substr(eq + 1));
    const std::string val = unquote(raw);
    try {
      if (key == "graph") {
        graph_kind_set = true;
        if (val == "cp") {
          cfg.graph.kind = GraphKind::Cp;
        } else if (val == "ba") {
          cfg.graph.kind = GraphKind::Ba;
        } else if (val == "file") {
          cfg.graph.kind = GraphKind::File;
        } else {
          cfg.graph.kind = GraphKind::File;
          cfg.graph.file = val;
        }
      } else if (key == "graph_file") {
        cfg.graph.file = val;
        if (!graph_kind_set) cfg.graph.kind = GraphKind::File;
      } else if (key == "n") {
        cfg.graph.cp.n = cfg.graph.ba.n = to_int<Index>(key, val);
      } else if (key == "p1") {
        cfg.graph.cp.p1 = to_double(key, val);
      } else if (key == "p2") {
        cfg.graph.cp.p2 = to_double(key, val);
      } else if (key == "core_size") {
        cfg.graph.cp.core_size = to_int<Index>(key, val);
      } else if (key == "m_attach") {
        cfg.graph.ba.m_attach = to_int<Index>(key, val);
      } else if (key == "filter") {
        cfg.filter = GraphFilter::parse(val);
      } else if (key == "k") {
        cfg.excitation.k = to_int<Index>(key, val);
      } else if (key == "b_density") {
        cfg.excitation.b_density = to_double(key, val);
      } else if (key == "z_density") {
        cfg.excitation.z_density = to_double(key, val);
      } else if (key == "value_lo") {
        cfg.excitation.value_lo = to_double(key, val);
      } else if (key == "value_hi") {
        cfg.excitation.value_hi = to_double(key, val);
      } else if (key == "m") {
        cfg.m = to_int<Index>(key, val);
      } else if (key == "sigma2") {
        cfg.sigma2 = to_double(key, val);
      } else if (key == "c") {
        cfg.c = to_int<Index>(key, val);
      } else if (key == "truth") {
        cfg.truth = parse_truth_kind(val);
      } else if (key == "sweep") {
        cfg.sweep = parse_sweep_var(val);
      } else if (key == "values") {
        cfg.values.clear();
        for (const auto& v : split_list(raw)) cfg.values.push_back(to_double(key, v));
      } else if (key == "detectors") {
        cfg.detectors.clear();
        for (const auto& v : split_list(raw)) cfg.detectors.push_back(parse_method(v));
      } else if (key == "trials") {
        cfg.trials = to_int<int>(key, val);
      } else if (key == "seed") {
        cfg.base_seed = to_int<std::uint64_t>(key, val);
      } else if (key == "step_a") {
        cfg.nmf.step_a = to_double(key, val);
      } else if (key == "step_b") {
        cfg.nmf.step_b = to_double(key, val);
      } else if (key == "lambda_b") {
        cfg.nmf.lambda_b = to_double(key, val);
      } else if (key == "nmf_iters") {
        cfg.nmf.max_iters = to_int<int>(key, val);
      } else if (key == "lambda_l") {
        cfg.rpca.lambda_l = to_double(key, val);
      } else if (key == "lambda_s") {
        cfg.rpca.lambda_s = to_double(key, val);
      } else if (key == "rpca_relative") {
        if (val == "true" || val == "1") {
          cfg.rpca.relative = true;
        } else if (val == "false" || val == "0") {
          cfg.rpca.relative = false;
        } else {
          throw InputError("'" + key + "' expects true or false, got '" + val + "'");
        }
      } else if (key == "rpca_tol") {
        cfg.rpca.tol = to_double(key, val);
      } else if (key == "rpca_iters") {
        cfg.rpca.max_iters = to_int<int>(key, val);
      } else if (key == "knn") {
        cfg.knn = to_int<Index>(key, val);
      } else if (key == "output") {
        cfg.output = val;
      } else {
        throw InputError("unknown key '" + key + "'");
      }
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace cnd
