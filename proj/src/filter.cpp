#include "cnd/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cnd/error.hpp"

namespace cnd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("bad " + what + " '" + s + "'");
  }
}

}  // namespace

GraphFilter::GraphFilter(Kind kind, double gain) : kind_(std::move(kind)), gain_(gain) {
  require(std::isfinite(gain) && gain != 0.0, "filter gain must be finite and nonzero");
  if (auto* p = std::get_if<Polynomial>(&kind_)) require(!p->coeffs.empty(), "polynomial filter needs T >= 1");
}

GraphFilter GraphFilter::polynomial(std::vector<double> coeffs, double gain) {
  return GraphFilter(Polynomial{std::move(coeffs)}, gain);
}
GraphFilter GraphFilter::iir(double c, double gain) { return GraphFilter(Iir{c}, gain); }
GraphFilter GraphFilter::diffusion(double alpha, double gain) { return GraphFilter(Diffusion{alpha}, gain); }

GraphFilter GraphFilter::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  require(colon != std::string::npos, "filter spec must look like kind:param, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string param = spec.substr(colon + 1);
  if (kind == "iir") return iir(parse_double(param, "IIR coefficient"));
  if (kind == "diffusion") return diffusion(parse_double(param, "diffusion rate"));
  if (kind == "poly") {
    std::vector<double> coeffs;
    std::stringstream ss(param);
    std::string tok;
    while (std::getline(ss, tok, ',')) coeffs.push_back(parse_double(tok, "polynomial coefficient"));
    return polynomial(std::move(coeffs));
  }
  throw InputError("unknown filter kind '" + kind + "'");
}

std::string GraphFilter::to_string() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{[&](const Polynomial& p) {
                          out << "poly:";
                          for (size_t i = 0; i < p.coeffs.size(); ++i) out << (i ? "," : "") << p.coeffs[i];
                        },
                        [&](const Iir& f) { out << "iir:" << f.c; },
                        [&](const Diffusion& f) { out << "diffusion:" << f.alpha; }},
             kind_);
  if (gain_ != 1.0) out << " (gain " << gain_ << ")";
  return out.str();
}

double GraphFilter::response(double lambda) const {
  const double h = std::visit(Overloaded{[&](const Polynomial& p) {
                                           double acc = 0.0;  // Horner
                                           for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it)
                                             acc = acc * lambda + *it;
                                           return acc;
                                         },
                                         [&](const Iir& f) { return 1.0 / (1.0 - f.c * lambda); },
                                         [&](const Diffusion& f) { return std::exp(f.alpha * lambda); }},
                              kind_);
  return gain_ * h;
}

Eigen::VectorXd GraphFilter::responses(const Eigen::VectorXd& eigenvalues) const {
  return eigenvalues.unaryExpr([this](double l) { return response(l); });
}

void GraphFilter::validate(const Eigen::VectorXd& eigenvalues) const {
  if (const auto* f = std::get_if<Iir>(&kind_)) {
    for (Index i = 0; i < eigenvalues.size(); ++i) {
      if (f->c * eigenvalues[i] >= 1.0) {
        std::ostringstream msg;
        msg << "IIR filter requires c*lambda < 1; got c=" << f->c << ", lambda=" << eigenvalues[i];
        throw InputError(msg.str());
      }
    }
  }
}

FrequencyProfile FrequencyProfile::from_responses(Eigen::VectorXd responses) {
  require(responses.size() >= 1, "frequency profile needs at least one response");
  const double pass = std::abs(responses[0]);
  require(pass > 0.0, "frequency response at lambda_1 is zero");
  FrequencyProfile p;
  p.eta = responses.size() > 1 ? responses.tail(responses.size() - 1).cwiseAbs().maxCoeff() / pass : 0.0;
  p.responses = std::move(responses);
  return p;
}

Eigen::MatrixXd apply(const GraphFilter& filter, const Graph& g, const Eigen::MatrixXd& x) {
  require(x.rows() == g.size(), "signal rows must match node count");
  const auto& s = g.spectrum();
  filter.validate(s.eigenvalues);
  const Eigen::VectorXd h = filter.responses(s.eigenvalues);
  Eigen::MatrixXd spectral = s.eigenvectors.transpose() * x;
  spectral = h.asDiagonal() * spectral;
  return s.eigenvectors * spectral;
}

Eigen::MatrixXd filter_matrix(const GraphFilter& filter, const Graph& g) {
  const auto& s = g.spectrum();
  filter.validate(s.eigenvalues);
  const Eigen::VectorXd h = filter.responses(s.eigenvalues);
  return s.eigenvectors * h.asDiagonal() * s.eigenvectors.transpose();
}

FrequencyProfile frequency_profile(const GraphFilter& filter, const Eigen::VectorXd& eigenvalues) {
  filter.validate(eigenvalues);
  return FrequencyProfile::from_responses(filter.responses(eigenvalues));
}

FrequencyProfile frequency_profile(const GraphFilter& filter, const Spectrum& spectrum) {
  return frequency_profile(filter, spectrum.eigenvalues);
}

FrequencyProfile boost(const GraphFilter& filter, const Eigen::VectorXd& eigenvalues, double rho) {
  require(rho >= 0.0, "boost requires rho >= 0");
  filter.validate(eigenvalues);
  Eigen::VectorXd shifted = filter.responses(eigenvalues).array() - rho;
  if (shifted.size() > 0 && shifted[0] == 0.0) {
    FrequencyProfile p;
    p.responses = std::move(shifted);
    p.eta = std::numeric_limits<double>::infinity();
    return p;
  }
  return FrequencyProfile::from_responses(std::move(shifted));
}

FrequencyProfile boost(const GraphFilter& filter, const Spectrum& spectrum, double rho) {
  return boost(filter, spectrum.eigenvalues, rho);
}

double optimal_rho(const FrequencyProfile& profile) {
  const auto& h = profile.responses;
  if (h.size() == 1) return h[0];
  return 0.5 * (h[0] + h.tail(h.size() - 1).minCoeff());
}

double optimal_rho(const GraphFilter& filter, const Spectrum& spectrum) {
  return optimal_rho(frequency_profile(filter, spectrum));
}

double shift_ratio(const FrequencyProfile& profile, double rho) {
  require(rho > 0.0, "shift ratio requires rho > 0");
  return (profile.responses.array() / rho - 1.0).abs().maxCoeff();
}

double sparse_ratio_bound(const FrequencyProfile& profile) {
  const auto& h = profile.responses;
  require(h.size() >= 2, "sparse ratio bound needs at least two frequencies");
  const Index n = h.size();
  const double h1 = h[0];
  const double h_min = h.tail(n - 1).minCoeff();
  const double spread = (std::max(h[1], h[n - 1]) - h_min) / h1;
  const double num = 1.0 - profile.eta + spread;
  const double den = 1.0 + profile.eta - spread;
  if (!(den > 0.0)) throw InputError("sparse ratio bound: non-positive denominator (response not convex/nonnegative?)");
  return num / den;
}

PcaBound pca_error_bound(const Graph& g, const GraphFilter& filter, const Eigen::MatrixXd& b) {
  require(b.rows() == g.size(), "B rows must match node count");
  const auto& s = g.spectrum();
  const FrequencyProfile profile = frequency_profile(filter, s);
  const Eigen::MatrixXd hb = apply(filter, g, b);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(hb, Eigen::ComputeThinU | Eigen::ComputeThinV);

  PcaBound out;
  out.eta = profile.eta;
  out.q1 = svd.matrixV().col(0);
  const Eigen::VectorXd bq = b * out.q1;
  const Eigen::VectorXd v1 = s.eigenvectors.col(0);
  out.alignment = std::abs(v1.dot(bq));
  if (out.alignment < 1e-12) throw SolverError("pca error bound: v1^T B q1 vanishes");
  const Index n = g.size();
  out.leakage = (s.eigenvectors.rightCols(n - 1).transpose() * bq).norm();
  out.value = std::sqrt(2.0) * out.eta * out.leakage / out.alignment;
  out.top_left = svd.matrixU().col(0);
  if (out.top_left.dot(v1) < 0) out.top_left = -out.top_left;
  return out;
}

}  // namespace cnd
