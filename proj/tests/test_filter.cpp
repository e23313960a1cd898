#include <doctest.h>

#include <cmath>
#include <limits>

#include "cnd/error.hpp"
#include "cnd/filter.hpp"
#include "cnd/signal.hpp"
#include "helpers.hpp"

using namespace cnd;
using namespace cnd::test;

namespace {

// Eigenvalues with lambda_2 / lambda_1 ~ 0.12 and a stopband gap of ln(5)/0.2,
// the setting behind the weak/strong response comparison.
Eigen::VectorXd two_scale_spectrum() {
  Eigen::VectorXd ev(8);
  ev << 9.1466, 1.1, 0.7, 0.2, -0.4, -0.9, -1.3, -1.8;
  return ev;
}

double grid_min_ratio(const Eigen::MatrixXd& v, const Eigen::VectorXd& h, const Eigen::MatrixXd& b, double hi,
                      int points) {
  const double bn = b.norm();
  const Eigen::MatrixXd vtb = v.transpose() * b;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= points; ++i) {
    const double rho = hi * i / points;
    const Eigen::VectorXd shifted = h.array() - rho;
    const double val = (v * shifted.asDiagonal() * vtb).norm() / (rho * bn);
    best = std::min(best, val);
  }
  return best;
}

}  // namespace

TEST_CASE("identity filters leave signals unchanged") {
  Rng rng(1);
  const Graph g = generate_cp({40, 5, 0.5, 0.1, 2});
  const Eigen::MatrixXd x = uniform_matrix(40, 7, rng);
  CHECK(apply(GraphFilter::polynomial({1.0}), g, x).isApprox(x, 1e-12));
  CHECK(apply(GraphFilter::diffusion(0.0), g, x).isApprox(x, 1e-12));
}

TEST_CASE("IIR on K3 matches a direct solve") {
  const Graph g = Graph::from_adjacency(complete(3));
  const Eigen::Vector3d e1(1, 0, 0);
  const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - complete(3) / 50.0;
  const Eigen::Vector3d expected = m.lu().solve(e1);
  CHECK((apply(GraphFilter::iir(1.0 / 50.0), g, e1) - expected).norm() < 1e-12);
}

TEST_CASE("spectral IIR equals (I - cA)^{-1} X on random graphs") {
  Rng rng(8);
  for (int rep = 0; rep < 8; ++rep) {
    const Index n = 10 + 5 * rep;
    const Graph g = generate_cp({n, 4, 0.8, 0.2, static_cast<std::uint64_t>(rep)});
    const double c = 0.5 / g.spectrum().eigenvalues[0];
    const Eigen::MatrixXd x = uniform_matrix(n, 3, rng);
    const Eigen::MatrixXd direct =
        (Eigen::MatrixXd::Identity(n, n) - c * g.adjacency()).partialPivLu().solve(x);
    const Eigen::MatrixXd spectral = apply(GraphFilter::iir(c), g, x);
    CHECK((spectral - direct).norm() / direct.norm() <= 1e-8);
  }
}

TEST_CASE("polynomial filter matches the matrix polynomial") {
  const Graph g = generate_ba({20, 2, 3});
  const Eigen::MatrixXd& a = g.adjacency();
  const Eigen::MatrixXd direct = 0.5 * Eigen::MatrixXd::Identity(20, 20) + 0.2 * a + 0.03 * a * a;
  CHECK(filter_matrix(GraphFilter::polynomial({0.5, 0.2, 0.03}), g).isApprox(direct, 1e-10));
}

TEST_CASE("IIR validity is checked against the spectrum") {
  const Graph g = Graph::from_adjacency(complete(5));  // lambda_1 = 4
  CHECK_THROWS_AS(apply(GraphFilter::iir(0.26), g, Eigen::MatrixXd::Ones(5, 1)), InputError);
  CHECK_NOTHROW(apply(GraphFilter::iir(0.24), g, Eigen::MatrixXd::Ones(5, 1)));
  CHECK_THROWS_AS(frequency_profile(GraphFilter::iir(0.3), g.spectrum()), InputError);
}

TEST_CASE("filter spec parsing") {
  CHECK(std::get<Iir>(GraphFilter::parse("iir:0.02").kind()).c == 0.02);
  CHECK(std::get<Diffusion>(GraphFilter::parse("diffusion:0.1").kind()).alpha == 0.1);
  CHECK(std::get<Polynomial>(GraphFilter::parse("poly:1,0.5,0.25").kind()).coeffs ==
        std::vector<double>{1, 0.5, 0.25});
  CHECK(GraphFilter::parse(GraphFilter::iir(0.125).to_string()).response(2.0) == GraphFilter::iir(0.125).response(2.0));
  CHECK_THROWS_AS(GraphFilter::parse("lowpass:1"), InputError);
  CHECK_THROWS_AS(GraphFilter::parse("iir:abc"), InputError);
  CHECK_THROWS_AS(GraphFilter::parse("poly:"), InputError);
}

TEST_CASE("low-pass ratio of a diffusion filter") {
  const Graph g = generate_cp({100, 10, 0.4, 0.05, 7});
  const auto& ev = g.spectrum().eigenvalues;
  for (double alpha : {0.05, 0.1, 0.5}) {
    const FrequencyProfile p = frequency_profile(GraphFilter::diffusion(alpha), g.spectrum());
    CHECK(p.eta == doctest::Approx(std::exp(alpha * (ev[1] - ev[0]))).epsilon(1e-12));
    CHECK(p.low_pass());
  }
}

TEST_CASE("weak and strong responses on a two-scale spectrum") {
  const Eigen::VectorXd ev = two_scale_spectrum();
  CHECK(ev[1] / ev[0] == doctest::Approx(0.12).epsilon(0.01));
  const FrequencyProfile strong = frequency_profile(GraphFilter::diffusion(0.2, 1.0 / 7.0), ev);
  const FrequencyProfile weak = frequency_profile(GraphFilter::iir(0.01), ev);
  CHECK(strong.eta == doctest::Approx(0.2).epsilon(0.01));
  CHECK(weak.eta == doctest::Approx(0.92).epsilon(0.01));
}

TEST_CASE("eta is invariant to the filter gain") {
  const Graph g = generate_cp({50, 5, 0.6, 0.1, 4});
  for (double s : {0.1, 3.0, 50.0}) {
    CHECK(frequency_profile(GraphFilter::iir(0.02, s), g.spectrum()).eta ==
          doctest::Approx(frequency_profile(GraphFilter::iir(0.02), g.spectrum()).eta).epsilon(1e-12));
  }
}

TEST_CASE("frequency profile rejects a zero passband") {
  CHECK_THROWS_AS(FrequencyProfile::from_responses(Eigen::Vector3d(0, 1, 1)), InputError);
}

TEST_CASE("boosting") {
  const Graph g = generate_cp({100, 10, 0.4, 0.05, 7});
  const GraphFilter f = GraphFilter::iir(0.02);
  const FrequencyProfile base = frequency_profile(f, g.spectrum());
  const FrequencyProfile same = boost(f, g.spectrum(), 0.0);
  CHECK(same.eta == base.eta);
  CHECK(same.responses == base.responses);

  const FrequencyProfile zero = boost(GraphFilter::polynomial({2.0}), g.spectrum(), 2.0);
  CHECK(zero.responses.isZero(0.0));
  CHECK(std::isinf(zero.eta));
  CHECK_THROWS_AS(boost(f, g.spectrum(), -1.0), InputError);
}

TEST_CASE("boosting an IIR filter with rho = 1 shrinks eta by lambda_2 / lambda_1") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_cp({100, 10, 0.4, 0.05, seed});
    const auto& ev = g.spectrum().eigenvalues;
    const GraphFilter f = GraphFilter::iir(0.02);
    // holds when the stopband peak of lambda h(lambda) sits at lambda_2
    if (ev[1] <= 0 || std::abs(ev[99]) * f.response(ev[99]) > ev[1] * f.response(ev[1])) continue;
    ++checked;
    const double eta = frequency_profile(f, g.spectrum()).eta;
    const double boosted = boost(f, g.spectrum(), 1.0).eta;
    CHECK(boosted <= ev[1] / ev[0] * eta + 1e-12);
  }
  CHECK(checked >= 5);
}

TEST_CASE("optimal rho") {
  CHECK(optimal_rho(FrequencyProfile::from_responses(Eigen::Vector3d(1, 1, 1))) == 1.0);
  CHECK(optimal_rho(FrequencyProfile::from_responses(Eigen::Vector4d(10, 5, 2, 3))) == 6.0);

  const Graph g = generate_cp({100, 10, 0.4, 0.05, 7});
  const FrequencyProfile p = frequency_profile(GraphFilter::iir(1.0 / 50.0), g.spectrum());
  const double rho_star = optimal_rho(p);
  const double hi = 2.0 * p.responses[0];
  const int points = 10000;
  double best = std::numeric_limits<double>::infinity(), arg = 0;
  for (int i = 1; i <= points; ++i) {
    const double rho = hi * i / points;
    const double f = shift_ratio(p, rho);
    if (f < best) {
      best = f;
      arg = rho;
    }
  }
  CHECK(std::abs(arg - rho_star) <= hi / points);
  CHECK(shift_ratio(p, rho_star) <= best + 1e-12);
}

TEST_CASE("sparse ratio bound closed forms") {
  // flat stopband: h2 = hn = hmin
  const FrequencyProfile flat = FrequencyProfile::from_responses(Eigen::Vector4d(2.0, 0.5, 0.5, 0.5));
  CHECK(sparse_ratio_bound(flat) == doctest::Approx((1 - flat.eta) / (1 + flat.eta)));
  const FrequencyProfile near_one = FrequencyProfile::from_responses(Eigen::Vector3d(1.0, 0.999999, 0.999999));
  CHECK(sparse_ratio_bound(near_one) < 1e-6);
  // the bound equals f(rho*) = (h1 - hmin) / (h1 + hmin) for nonnegative convex responses
  const FrequencyProfile p = FrequencyProfile::from_responses(Eigen::Vector4d(3.0, 1.2, 0.4, 0.9));
  CHECK(sparse_ratio_bound(p) == doctest::Approx((3.0 - 0.4) / (3.0 + 0.4)));
  CHECK(shift_ratio(p, optimal_rho(p)) == doctest::Approx(sparse_ratio_bound(p)));

  CHECK_THROWS_AS(sparse_ratio_bound(FrequencyProfile::from_responses(Eigen::Vector3d(1.0, 5.0, -5.0))), InputError);
}

TEST_CASE("sparse ratio bound dominates a grid search over rho") {
  Rng rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    const Index n = 10;
    Eigen::VectorXd lam(n);
    lam[0] = 5.0;
    for (Index i = 1; i < n; ++i) lam[i] = 3.0 - 6.0 * static_cast<double>(i - 1) / (n - 2);
    // convex, nonnegative, maximal at lambda_1
    const double c0 = 0.2 + u(rng), c2 = 0.05 + 0.2 * u(rng), t = -1.0 + u(rng);
    const Eigen::VectorXd h = (c0 + c2 * (lam.array() - t).square()).matrix();
    const FrequencyProfile p = FrequencyProfile::from_responses(h);
    const Eigen::MatrixXd v = random_orthogonal(n, rng);
    const double bound = sparse_ratio_bound(p);
    for (int b_rep = 0; b_rep < 20; ++b_rep) {
      const Eigen::MatrixXd b = uniform_matrix(n, 4, rng);
      CHECK(grid_min_ratio(v, h, b, 2.0 * h[0], 2000) <= bound + 1e-3);
    }
  }
}

TEST_CASE("PCA error bound") {
  const Graph kn = Graph::from_adjacency(complete(6));
  // B = I: q1 = v1, the leakage term vanishes
  const PcaBound ident = pca_error_bound(generate_cp({30, 5, 0.8, 0.1, 1}), GraphFilter::iir(0.02),
                                         Eigen::MatrixXd::Identity(30, 30));
  CHECK(ident.value < 1e-10);
  // h(lambda) = lambda + 1 is an ideal filter on K_n (stopband eigenvalue -1)
  Rng rng(3);
  const PcaBound ideal = pca_error_bound(kn, GraphFilter::polynomial({1.0, 1.0}), uniform_matrix(6, 3, rng));
  CHECK(ideal.eta == doctest::Approx(0.0));
  CHECK(ideal.value < 1e-12);

  const Graph g = generate_cp({100, 10, 0.4, 0.05, 7});
  ExcitationParams ep;
  ep.k = 40;
  ep.seed = 3;
  const Excitation e = generate_excitation(100, 200, ep);
  const PcaBound cp = pca_error_bound(g, GraphFilter::iir(1.0 / 50.0), e.b);
  const Eigen::VectorXd c_eig = eigencentrality(g);
  CHECK((cp.top_left - c_eig).norm() <= cp.value);
  CHECK(cp.eta > 0.5);

  CHECK_THROWS_AS(pca_error_bound(g, GraphFilter::iir(0.02), Eigen::MatrixXd::Zero(100, 2)), SolverError);
}

TEST_CASE("top eigenvector of the noiseless covariance is invariant to filter gain") {
  const auto g = std::make_shared<const Graph>(generate_cp({60, 6, 0.6, 0.1, 2}));
  ExcitationParams ep;
  ep.k = 10;
  ep.seed = 4;
  const Excitation e = generate_excitation(60, 100, ep);
  const Eigen::MatrixXd y1 = apply(GraphFilter::iir(0.02), *g, e.b * e.z);
  const Eigen::MatrixXd y2 = apply(GraphFilter::iir(0.02, 7.5), *g, e.b * e.z);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s1(y1 * y1.transpose()), s2(y2 * y2.transpose());
  CHECK(std::abs(s1.eigenvectors().col(59).dot(s2.eigenvectors().col(59))) == doctest::Approx(1.0).epsilon(1e-10));
}
