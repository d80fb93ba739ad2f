#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spectro/expectation.hpp"
#include "spectro/sampler.hpp"

using namespace spectro;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
double panel_gl(F&& f, double a, double b, int m) {
  const auto& [t, w] = spectro::detail::gauss_legendre_unit(32);
  double acc = 0.0;
  for (int c = 0; c < m; ++c) {
    const double ca = a + (b - a) * c / m, cb = a + (b - a) * (c + 1) / m;
    const double mid = 0.5 * (ca + cb), half = 0.5 * (cb - ca);
    for (size_t l = 0; l < t.size(); ++l) acc += half * w[l] * f(mid + half * t[l]);
  }
  return acc;
}

}  // namespace

TEST_CASE("target density basics") {
  const double eps = 0.05;
  const PhasePoint w(0.3, -0.2);
  const State g = State::gaussian(eps, w);
  QuadratureSpec quad;

  // j = 0 is the Husimi function.
  const PhasePoint z(0.35, -0.1);
  CHECK(target_density(g, 0, z, quad) == Catch::Approx(husimi(g, z, quad)).epsilon(1e-13));

  // d = 2, j = 1: both order-1 spectrograms vanish at the packet center.
  const PhasePoint w2({0.1, 0.2}, {-0.3, 0.0});
  const State g2 = State::gaussian(eps, w2);
  CHECK(target_density(g2, 1, w2, quad) == 0.0);

  // j = 1, d = 1: a probability density (mass one over the effective box).
  const double R = 8 * std::sqrt(eps);
  const double mass = panel_gl(
      [&](double q) {
        return panel_gl([&](double p) { return target_density(g, 1, PhasePoint(q, p), quad); },
                        w.p[0] - R, w.p[0] + R, 8);
      },
      w.q[0] - R, w.q[0] + R, 8);
  CHECK(mass == Catch::Approx(1.0).margin(1e-6));

  CHECK_THROWS_AS(target_density(g, -1, z, quad), std::invalid_argument);
}

TEST_CASE("metropolis rule has the right stationary law on a two-state toy") {
  // States {0, 1} with unnormalized target (3, 7); proposal flips a fair
  // coin. Detailed balance gives occupancy 0.7 for state 1.
  spectro::detail::Rng rng(2024);
  const double target[2] = {3.0, 7.0};
  int state = 0;
  long occupied = 0;
  const long steps = 400000;
  for (long i = 0; i < steps; ++i) {
    if (rng.uniform01() < 0.5) {
      const int proposal = 1 - state;
      if (mh_accept(target[proposal], target[state], rng.uniform01())) state = proposal;
    }
    occupied += state;
  }
  CHECK(static_cast<double>(occupied) / steps == Catch::Approx(0.7).margin(0.005));
}

TEST_CASE("mh_accept edge cases") {
  CHECK(mh_accept(1.0, 1.0, 0.999));       // ratio 1 accepts for u < 1
  CHECK(mh_accept(0.5, 0.0, 0.999));       // escape from a zero-density point
  CHECK_FALSE(mh_accept(0.0, 0.0, 0.0));   // never move to nothing
  CHECK_FALSE(mh_accept(0.2, 1.0, 0.25));  // u >= ratio rejects
  CHECK(mh_accept(0.2, 1.0, 0.15));
}

TEST_CASE("chains are reproducible bitwise") {
  const double eps = 0.02;
  const State g = State::gaussian(eps, PhasePoint(0.1, 0.0));
  ChainConfig cfg;
  cfg.n_samples = 2000;
  cfg.burn_in = 100;
  cfg.seed = 42;
  const SampleSet a = metropolis_chain(g, 0, cfg);
  const SampleSet b = metropolis_chain(g, 0, cfg);
  CHECK(a.points == b.points);
  CHECK(a.acceptance_rate == b.acceptance_rate);

  cfg.seed = 43;
  const SampleSet c = metropolis_chain(g, 0, cfg);
  CHECK(a.points != c.points);

  // Split over independent chains: still deterministic.
  cfg.seed = 42;
  cfg.n_chains = 3;
  const SampleSet m1 = metropolis_chain(g, 0, cfg);
  const SampleSet m2 = metropolis_chain(g, 0, cfg);
  CHECK(m1.points == m2.points);
  CHECK(m1.size() == cfg.n_samples);
}

TEST_CASE("husimi sampling recovers Gaussian moments") {
  const double eps = 0.01;
  const PhasePoint w(0.5, -1.0);
  const State g = State::gaussian(eps, w);
  ChainConfig cfg;
  cfg.n_samples = 100000;
  cfg.burn_in = 1000;
  cfg.seed = 7;
  const SampleSet set = metropolis_chain(g, 0, cfg);
  REQUIRE(set.size() == cfg.n_samples);
  CHECK(set.acceptance_rate > 0.2);
  CHECK(set.acceptance_rate < 0.9);

  double mq = 0, mp = 0;
  for (long i = 0; i < set.size(); ++i) {
    mq += set.points[2 * i];
    mp += set.points[2 * i + 1];
  }
  mq /= set.size();
  mp /= set.size();
  // The Husimi of g_w is N(w, eps I); correlated-chain standard error is a
  // few times sqrt(eps/n).
  const double se = std::sqrt(eps / cfg.n_samples);
  CHECK(std::abs(mq - w.q[0]) <= 8 * se);
  CHECK(std::abs(mp - w.p[0]) <= 8 * se);

  double cqq = 0, cpp = 0, cqp = 0;
  for (long i = 0; i < set.size(); ++i) {
    const double dq = set.points[2 * i] - mq, dp = set.points[2 * i + 1] - mp;
    cqq += dq * dq;
    cpp += dp * dp;
    cqp += dq * dp;
  }
  cqq /= set.size();
  cpp /= set.size();
  cqp /= set.size();
  CHECK(cqq == Catch::Approx(eps).epsilon(0.1));
  CHECK(cpp == Catch::Approx(eps).epsilon(0.1));
  CHECK(std::abs(cqp) <= 0.1 * eps);
}

TEST_CASE("ergodic averages decay like n^{-1/2}") {
  const double eps = 0.01;
  const PhasePoint w(0.2, 0.4);
  const State g = State::gaussian(eps, w);
  const std::vector<long> ns = {1000, 10000, 100000, 1000000};
  std::vector<double> lx, ly;
  for (size_t i = 0; i < ns.size(); ++i) {
    double mse = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      ChainConfig cfg;
      cfg.n_samples = ns[i];
      cfg.burn_in = 1000;
      cfg.seed = 1000 + seed;
      const SampleSet set = metropolis_chain(g, 0, cfg);
      double mq = 0;
      for (long m = 0; m < set.size(); ++m) mq += set.points[2 * m];
      mq /= set.size();
      mse += (mq - w.q[0]) * (mq - w.q[0]);
    }
    lx.push_back(std::log10(static_cast<double>(ns[i])));
    ly.push_back(0.5 * std::log10(mse / 10));
  }
  const double slope = spectro::detail::regression_slope(lx, ly);
  CHECK(slope >= -0.65);
  CHECK(slope <= -0.35);
}

TEST_CASE("auto seed finds positive density") {
  const double eps = 0.05;
  QuadratureSpec quad;

  const PhasePoint w(0.7, 0.1);
  const State g = State::gaussian(eps, w);
  const PhasePoint zg = auto_seed(g, 0, quad, 1);
  CHECK(zg == w);  // center itself has positive Husimi density

  // phi_1: its Husimi vanishes exactly at the origin, so the seed must come
  // from the perturbation loop.
  const State phi1 = State::hermite(eps, MultiIndex::single(1));
  CHECK(target_density(phi1, 0, PhasePoint(0.0, 0.0), quad) == 0.0);
  const PhasePoint zh = auto_seed(phi1, 0, quad, 1);
  CHECK(target_density(phi1, 0, zh, quad) > 0.0);
  CHECK(zh.squared_norm() > 0.0);

  const State hat = State::hat(eps, 0.4);
  const QuadratureSpec qmc = default_quadrature(hat);
  const PhasePoint zt = auto_seed(hat, 0, qmc, 1);
  CHECK(std::abs(zt.q[0] - 0.4) <= 3 * std::sqrt(eps));
  CHECK(std::abs(zt.p[0]) <= 3 * std::sqrt(eps));
}

TEST_CASE("acceptance rate is reasonable across seeds") {
  const double eps = 0.02;
  const State g = State::gaussian(eps, PhasePoint(0.0, 0.0));
  for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    ChainConfig cfg;
    cfg.n_samples = 10000;
    cfg.seed = seed;
    const SampleSet set = metropolis_chain(g, 0, cfg);
    CHECK(set.acceptance_rate > 0.2);
    CHECK(set.acceptance_rate < 0.9);
  }
}

TEST_CASE("hat state sampling smoke test") {
  const double eps = 0.05;
  const State hat = State::hat(eps, 0.0);
  ChainConfig cfg;
  cfg.n_samples = 4000;
  cfg.burn_in = 500;
  cfg.seed = 3;
  cfg.quad = default_quadrature(hat);
  const SampleSet set = metropolis_chain(hat, 2, cfg);
  CHECK(set.size() == cfg.n_samples);
  CHECK(set.acceptance_rate > 0.0);
  CHECK(set.acceptance_rate <= 1.0);
  for (double v : set.points) CHECK(std::isfinite(v));
}
