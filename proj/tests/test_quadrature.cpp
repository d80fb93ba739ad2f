#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spectro/inner_product.hpp"
#include "spectro/quadrature.hpp"
#include "spectro/states.hpp"

using namespace spectro;

TEST_CASE("gauss_hermite one-point rule") {
  const double c = 0.0;
  const NodeSet ns = gauss_hermite_rule(1, 1.0, std::span<const double>(&c, 1), 1);
  REQUIRE(ns.size() == 1);
  CHECK(ns.points[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(ns.weights[0] == Catch::Approx(std::sqrt(3.14159265358979323846)).epsilon(1e-14));
}

TEST_CASE("gauss_hermite integrates x^2 e^{-x^2}") {
  const double c = 0.0;
  const NodeSet ns = gauss_hermite_rule(2, 1.0, std::span<const double>(&c, 1), 1);
  double acc = 0.0;
  for (long i = 0; i < ns.size(); ++i) acc += ns.weights[i] * ns.points[i] * ns.points[i];
  CHECK(acc == Catch::Approx(std::sqrt(3.14159265358979323846) / 2).epsilon(1e-12));
}

namespace {

// int x^m e^{-x^2} dx: sqrt(pi) (m-1)!! / 2^{m/2} for even m, 0 for odd m.
double gaussian_poly_moment(int m) {
  if (m % 2) return 0.0;
  double v = std::sqrt(3.14159265358979323846);
  for (int k = m - 1; k > 0; k -= 2) v *= 0.5 * k;
  return v;
}

}  // namespace

TEST_CASE("gauss_hermite polynomial exactness up to degree 2n-1") {
  const double c = 0.0;
  for (int n : {5, 10, 20}) {
    const NodeSet ns = gauss_hermite_rule(n, 1.0, std::span<const double>(&c, 1), 1);
    for (int m = 0; m <= 2 * n - 1; ++m) {
      double acc = 0.0, abs_acc = 0.0;
      for (long i = 0; i < ns.size(); ++i) {
        const double term = ns.weights[i] * std::pow(ns.points[i], m);
        acc += term;
        abs_acc += std::abs(term);
      }
      // Relative to the absolute moment, the scale of the summands (odd
      // moments vanish only through cancellation).
      const double ref = gaussian_poly_moment(m);
      CHECK(std::abs(acc - ref) <= 1e-12 * std::max(1.0, abs_acc));
    }
  }
}

TEST_CASE("gauss_hermite rescaling matches the shifted weight") {
  // int (x-c)^2 e^{-(x-c)^2/eps} dx = eps^{3/2} sqrt(pi)/2.
  const double eps = 0.05, c = 1.3;
  const NodeSet ns = gauss_hermite_rule(12, eps, std::span<const double>(&c, 1), 1);
  double acc = 0.0;
  for (long i = 0; i < ns.size(); ++i)
    acc += ns.weights[i] * (ns.points[i] - c) * (ns.points[i] - c);
  CHECK(acc ==
        Catch::Approx(std::pow(eps, 1.5) * std::sqrt(3.14159265358979323846) / 2).epsilon(1e-12));
}

TEST_CASE("sobol first points") {
  const NodeSet one = sobol_nodes(1, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.points[0] == 0.0);

  const NodeSet three = sobol_nodes(3, 1);
  CHECK(three.points == std::vector<double>{0.0, 0.5, 0.75});
  CHECK(three.weights[0] == Catch::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("sobol determinism and bounds") {
  const NodeSet a = sobol_nodes(512, 8);
  const NodeSet b = sobol_nodes(512, 8);
  CHECK(a.points == b.points);  // bitwise
  for (double v : a.points) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  CHECK_THROWS_AS(sobol_nodes(16, 65), std::invalid_argument);
  CHECK_NOTHROW(sobol_nodes(16, 64));
}

namespace {

// Warnock's formula for the squared L2 star discrepancy.
double l2_star_discrepancy_sq(const NodeSet& ns) {
  const long n = ns.size();
  const int d = ns.dim;
  double s1 = 0.0;
  for (long i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int k = 0; k < d; ++k) prod *= 1.0 - ns.points[i * d + k] * ns.points[i * d + k];
    s1 += prod;
  }
  double s2 = 0.0;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      double prod = 1.0;
      for (int k = 0; k < d; ++k)
        prod *= 1.0 - std::max(ns.points[i * d + k], ns.points[j * d + k]);
      s2 += prod;
    }
  return std::pow(3.0, -d) - std::pow(2.0, 1 - d) / n * s1 + s2 / (n * n);
}

}  // namespace

TEST_CASE("sobol beats pseudo-random points on L2 star discrepancy") {
  const NodeSet sob = sobol_nodes(256, 2);
  NodeSet rnd;
  rnd.dim = 2;
  rnd.weights.assign(256, 1.0 / 256);
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 512; ++i) rnd.points.push_back(u(rng));
  CHECK(l2_star_discrepancy_sq(sob) < l2_star_discrepancy_sq(rnd));
}

TEST_CASE("normal_quantile round trip") {
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  for (double u : {1e-10, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1 - 1e-6}) {
    const double x = normal_quantile(u);
    CHECK(std::abs(cdf(x) - u) <= 1e-12 * std::max(u, 1 - u) + 1e-16);
  }
  CHECK(normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
}

TEST_CASE("window inner products: unit overlaps and orthogonality") {
  const double eps = 0.1;
  const PhasePoint w(0.4, -0.7);
  const State g = State::gaussian(eps, w);
  QuadratureSpec quad;  // gauss_hermite, 40 nodes

  CHECK(std::abs(inner_product_with_window(g, w, MultiIndex::single(0), quad) - 1.0) <= 1e-8);
  CHECK(std::abs(inner_product_with_window(g, w, MultiIndex::single(1), quad)) <= 1e-8);

  const State phi1 = State::hermite(eps, MultiIndex::single(1));
  CHECK(std::abs(inner_product_with_window(phi1, PhasePoint(0.0, 0.0), MultiIndex::single(1), quad) -
                 1.0) <= 1e-8);
}

TEST_CASE("window inner product reproduces the Gaussian overlap") {
  // <g_0, T_{(q,0)} phi_0> = e^{-q^2/(4 eps)}.
  const double eps = 0.05;
  const State g0 = State::gaussian(eps, PhasePoint(0.0, 0.0));
  for (double q : {0.1, 0.3, 0.6}) {
    const double expect = std::exp(-q * q / (4 * eps));
    QuadratureSpec gh;
    const auto v_gh = inner_product_with_window(g0, PhasePoint(q, 0.0), MultiIndex::single(0), gh);
    CHECK(std::abs(v_gh - expect) <= 1e-8);

    QuadratureSpec qmc{QuadKind::qmc_sobol, 1 << 14, 0, 0};
    const auto v_qmc = inner_product_with_window(g0, PhasePoint(q, 0.0), MultiIndex::single(0), qmc);
    // The fixed window-centered envelope is mismatched to the shifted
    // integrand, so QMC converges at a degraded constant here.
    CHECK(std::abs(v_qmc - expect) <= 2e-3);

    QuadratureSpec mc{QuadKind::monte_carlo, 200000, 99, 0};
    const auto v_mc = inner_product_with_window(g0, PhasePoint(q, 0.0), MultiIndex::single(0), mc);
    CHECK(std::abs(v_mc - expect) <= 5e-3);
  }
}

TEST_CASE("window inner products respect Cauchy-Schwarz") {
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double eps = 0.08;
  const std::vector<State> states = {State::gaussian(eps, PhasePoint(0.2, 0.1)),
                                     State::hermite(eps, MultiIndex::single(2)),
                                     State::hat(eps, 0.0)};
  for (const auto& s : states) {
    const QuadratureSpec quad = default_quadrature(s);
    const double tol = quad.kind == QuadKind::gauss_hermite ? 1e-8 : 2e-2;
    for (int trial = 0; trial < 25; ++trial) {
      const PhasePoint z(0.5 * std::sqrt(eps) * nd(rng), 0.5 * std::sqrt(eps) * nd(rng));
      for (int k = 0; k <= 2; ++k)
        CHECK(std::abs(inner_product_with_window(s, z, MultiIndex::single(k), quad)) <=
              1.0 + 5 * tol);
    }
  }
}

TEST_CASE("gauss_hermite refinement converges monotonically") {
  const double eps = 0.1;
  const State sup = State::superposition(
      {{1.0, State::gaussian(eps, PhasePoint(0.0, 0.3))},
       {std::complex<double>(0.0, 1.0), State::gaussian(eps, PhasePoint(0.4, -0.2))}});
  const PhasePoint z(0.15, 0.05);
  std::vector<double> change;
  std::complex<double> prev;
  for (int n : {10, 20, 40, 80, 160}) {
    QuadratureSpec quad{QuadKind::gauss_hermite, n, 0, 0};
    const auto v = inner_product_with_window(sup, z, MultiIndex::single(0), quad);
    if (n > 10) change.push_back(std::abs(v - prev));
    prev = v;
  }
  for (size_t i = 1; i < change.size(); ++i) CHECK(change[i] <= change[i - 1] + 1e-15);
}

TEST_CASE("monte carlo streams are reproducible and call-indexed") {
  const double eps = 0.1;
  const State g = State::gaussian(eps, PhasePoint(0.0, 0.0));
  const PhasePoint z(0.1, 0.2);
  QuadratureSpec mc{QuadKind::monte_carlo, 500, 1234, 7};
  const auto a = inner_product_with_window(g, z, MultiIndex::single(0), mc);
  const auto b = inner_product_with_window(g, z, MultiIndex::single(0), mc);
  CHECK(a == b);  // same stream, bitwise equal
  const auto c = inner_product_with_window(g, z, MultiIndex::single(0), mc.with_call_index(8));
  CHECK(a != c);  // different call index, different nodes
}
