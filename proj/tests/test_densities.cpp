#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spectro/densities.hpp"

using namespace spectro;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Composite 32-point Gauss-Legendre over [a, b] with m panels.
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

// 2D phase-space box integral.
template <class F>
double box_integral(F&& f, double qlo, double qhi, double plo, double phi_, int m = 8) {
  return panel_gl(
      [&](double q) {
        return panel_gl([&](double p) { return f(PhasePoint(q, p)); }, plo, phi_, m);
      },
      qlo, qhi, m);
}

}  // namespace

TEST_CASE("wigner closed form values") {
  const double eps = 0.2;
  const State g = State::gaussian(eps, PhasePoint(0.0, 0.0));
  CHECK(wigner_closed_form(g, PhasePoint(0.0, 0.0)) ==
        Catch::Approx(std::pow(kPi * eps, -1)).epsilon(1e-13));

  const State phi1 = State::hermite(eps, MultiIndex::single(1));
  CHECK(wigner_closed_form(phi1, PhasePoint(0.0, 0.0)) ==
        Catch::Approx(-std::pow(kPi * eps, -1)).epsilon(1e-13));
  // Zero circle of L_1(2|z|^2/eps) at |z|^2 = eps/2.
  const double r = std::sqrt(eps / 2);
  CHECK(wigner_closed_form(phi1, PhasePoint(r, 0.0)) == Catch::Approx(0.0).margin(1e-13));
  CHECK(wigner_closed_form(phi1, PhasePoint(r / std::sqrt(2.0), r / std::sqrt(2.0))) ==
        Catch::Approx(0.0).margin(1e-13));

  const State g2 = State::gaussian(eps, PhasePoint({0.1, -0.2}, {0.0, 0.3}));
  CHECK(wigner_closed_form(g2, PhasePoint({0.1, -0.2}, {0.0, 0.3})) ==
        Catch::Approx(std::pow(kPi * eps, -2)).epsilon(1e-13));

  CHECK_THROWS_AS(wigner_closed_form(State::hat(eps, 0.0), PhasePoint(0.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("wigner numerical agrees with closed forms") {
  const double eps = 0.1;
  QuadratureSpec quad;
  quad.nodes = 2000;
  std::mt19937_64 rng(555);
  std::normal_distribution<double> nd(0.0, std::sqrt(eps));

  const State g = State::gaussian(eps, PhasePoint(0.3, -0.5));
  const State phi2 = State::hermite(eps, MultiIndex::single(2));
  for (const State& s : {g, phi2}) {
    double max_diff = 0.0, max_ref = 0.0;
    for (int trial = 0; trial < 12; ++trial) {
      PhasePoint z = s.phase_center();
      z.q[0] += nd(rng);
      z.p[0] += nd(rng);
      const double ref = wigner_closed_form(s, z);
      max_diff = std::max(max_diff, std::abs(wigner_numerical(s, z, quad) - ref));
      max_ref = std::max(max_ref, std::abs(ref));
    }
    CHECK(max_diff <= 1e-6 * max_ref);
  }
  CHECK(wigner_numerical(g, PhasePoint(0.3, -0.5), quad) ==
        Catch::Approx(std::pow(kPi * eps, -1)).epsilon(1e-8));
}

TEST_CASE("wigner numerical of the hat: reality and momentum decay") {
  const double eps = 0.05;
  const State hat = State::hat(eps, 0.0);
  QuadratureSpec quad;
  quad.nodes = 4000;

  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-2 * std::sqrt(eps), 2 * std::sqrt(eps));
  const double scale = std::pow(2 * kPi * eps, -1);
  for (int trial = 0; trial < 20; ++trial) {
    double imag = 0.0;
    wigner_numerical(hat, PhasePoint(u(rng), u(rng)), quad, &imag);
    CHECK(imag <= 1e-8 * scale);
  }

  // Fast decay in p away from the O(sqrt(eps)) frequency band.
  const double p_far = 40 * std::sqrt(eps);
  CHECK(std::abs(wigner_numerical(hat, PhasePoint(0.0, p_far), quad)) <= 1e-2 * scale);
}

TEST_CASE("wigner numerical of the hat against an independent fine quadrature") {
  // Simpson on the correlation integral with a tiny step, written without any
  // of the library's quadrature plumbing.
  const double eps = 0.05;
  const double rt = std::sqrt(eps);
  const State hat = State::hat(eps, 0.0);
  QuadratureSpec quad;
  quad.nodes = 4000;
  auto hat_val = [&](double x) {
    const double a = std::abs(x);
    return a >= rt ? 0.0 : std::sqrt(1.5 / rt) * (1.0 - a / rt);
  };
  std::mt19937_64 rng(212);
  std::uniform_real_distribution<double> u(-0.8 * rt, 0.8 * rt);
  double max_diff = 0.0, max_ref = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double q = u(rng), p = u(rng);
    const double L = 2 * (rt - std::abs(q));
    const int n = 40001;
    const double h = 2 * L / (n - 1);
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = -L + i * h;
      const double f = hat_val(q - y / 2) * hat_val(q + y / 2);
      const double simp = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      re += simp * f * std::cos(p * y / eps);
      im += simp * f * std::sin(p * y / eps);
    }
    re *= h / 3 / (2 * kPi * eps);
    im *= h / 3 / (2 * kPi * eps);
    REQUIRE(std::abs(im) <= 1e-10);
    const double got = wigner_numerical(hat, PhasePoint(q, p), quad);
    max_diff = std::max(max_diff, std::abs(got - re));
    max_ref = std::max(max_ref, std::abs(re));
  }
  CHECK(max_diff <= 1e-6 * max_ref);
}

TEST_CASE("spectrogram closed forms at distinguished points") {
  const double eps = 0.08;
  const PhasePoint w(0.4, -0.1);
  const State g = State::gaussian(eps, w);
  QuadratureSpec quad;
  CHECK(spectrogram(g, MultiIndex::single(0), w, quad) ==
        Catch::Approx(std::pow(2 * kPi * eps, -1)).epsilon(1e-13));
  CHECK(spectrogram(g, MultiIndex::single(1), w, quad) == 0.0);

  // Husimi of phi_k: (2 pi eps)^{-d} e^{-|z|^2/(2eps)} (|z|^2/(2eps))^{|k|} / k!.
  const State phi3 = State::hermite(eps, MultiIndex::single(3));
  const PhasePoint z(0.21, -0.13);
  const double r = z.squared_norm() / (2 * eps);
  CHECK(husimi(phi3, z, quad) ==
        Catch::Approx(std::pow(2 * kPi * eps, -1) * std::exp(-r) * std::pow(r, 3) / 6).epsilon(1e-12));
}

TEST_CASE("spectrogram closed form matches the quadrature path") {
  const double eps = 0.06;
  std::mt19937_64 rng(3131);
  std::uniform_real_distribution<double> u(-1.5 * std::sqrt(eps), 1.5 * std::sqrt(eps));
  QuadratureSpec quad;  // gauss_hermite 40

  const State g = State::gaussian(eps, PhasePoint(0.2, 0.5));
  const State phi2 = State::hermite(eps, MultiIndex::single(2));
  for (const State& s : {g, phi2}) {
    for (int j = 0; j <= 3; ++j) {
      const MultiIndex k = MultiIndex::single(j);
      if (!spectro::detail::has_spectrogram_closed_form(s, k)) continue;
      double max_diff = 0.0, max_ref = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        PhasePoint z = s.phase_center();
        z.q[0] += u(rng);
        z.p[0] += u(rng);
        const double closed = spectrogram(s, k, z, quad, false);
        const double via_quad = spectrogram(s, k, z, quad, true);
        max_diff = std::max(max_diff, std::abs(closed - via_quad));
        max_ref = std::max(max_ref, std::abs(closed));
      }
      CHECK(max_diff <= 1e-5 * max_ref);
    }
  }
}

TEST_CASE("spectrogram is nonnegative everywhere sampled") {
  const double eps = 0.05;
  std::mt19937_64 rng(141);
  std::uniform_real_distribution<double> u(-3 * std::sqrt(eps), 3 * std::sqrt(eps));
  const std::vector<State> states = {State::gaussian(eps, PhasePoint(0.0, 0.0)),
                                     State::hermite(eps, MultiIndex::single(2)),
                                     State::hat(eps, 0.0)};
  for (const auto& s : states) {
    const QuadratureSpec quad = default_quadrature(s);
    for (int trial = 0; trial < 30; ++trial) {
      const PhasePoint z(u(rng), u(rng));
      CHECK(spectrogram(s, MultiIndex::single(trial % 3), z, quad) >= -1e-12);
    }
  }
}

TEST_CASE("hat spectrogram against a dense convolution oracle") {
  // S^{g_0}_psi(z) = int W_psi(w) (pi eps)^{-1} e^{-|z-w|^2/eps} dw, with
  // W_psi on a dense grid from the correlation integral. Entirely independent
  // of the importance-sampled inner-product path under test.
  const double eps = 0.05;
  const double rt = std::sqrt(eps);
  const State hat = State::hat(eps, 0.0);
  QuadratureSpec wq;
  wq.nodes = 3000;

  std::mt19937_64 rng(99221);
  std::uniform_real_distribution<double> u(-rt, rt);
  const QuadratureSpec qmc{QuadKind::qmc_sobol, 1000, 0, 0};
  auto hat_val = [&](double x) {
    const double a = std::abs(x);
    return a >= rt ? 0.0 : std::sqrt(1.5 / rt) * (1.0 - a / rt);
  };
  double max_diff = 0.0, max_diff_qmc = 0.0, max_ref = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const PhasePoint z(u(rng), 0.7 * u(rng));
    // q'-support of W_psi is exactly [-rt, rt]; p'-range limited by the
    // Gaussian factor around z_p.
    const double oracle = box_integral(
        [&](const PhasePoint& w) {
          const double g = std::exp(-((z.q[0] - w.q[0]) * (z.q[0] - w.q[0]) +
                                      (z.p[0] - w.p[0]) * (z.p[0] - w.p[0])) /
                                    eps) /
                           (kPi * eps);
          return g * wigner_numerical(hat, w, wq);
        },
        -rt, rt, z.p[0] - 7 * rt, z.p[0] + 7 * rt, 6);
    // Accurate inner-product route, written out locally: fine Simpson of
    // psi(x) conj(e^{ip(x-q/2)/eps} phi_0(x-q)) over the hat support.
    const long m = 200001;
    const double h = 2 * rt / (m - 1);
    std::complex<double> ip = 0.0;
    for (long i = 0; i < m; ++i) {
      const double x = -rt + i * h;
      const double simp = (i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double window = std::pow(kPi * eps, -0.25) *
                            std::exp(-(x - z.q[0]) * (x - z.q[0]) / (2 * eps));
      ip += simp * hat_val(x) * window *
            std::polar(1.0, -z.p[0] * (x - 0.5 * z.q[0]) / eps);
    }
    ip *= h / 3;
    const double s_accurate = std::norm(ip) / (2 * kPi * eps);
    const double s_qmc = spectrogram(hat, MultiIndex::single(0), z, qmc);
    max_diff = std::max(max_diff, std::abs(s_accurate - oracle));
    max_diff_qmc = std::max(max_diff_qmc, std::abs(s_qmc - oracle));
    max_ref = std::max(max_ref, std::abs(oracle));
  }
  // The inner-product representation itself reproduces the convolution;
  // the n = 1000 Sobol path adds its own quadrature error on top.
  CHECK(max_diff <= 1e-4 * max_ref);
  CHECK(max_diff_qmc <= 2e-2 * max_ref);
}

TEST_CASE("spectrogram mass is one") {
  const double eps = 0.07;
  QuadratureSpec quad;
  // Closed-form states: Gauss-Legendre panels over center +- 8 sqrt(eps).
  const double R = 8 * std::sqrt(eps);
  const State g = State::gaussian(eps, PhasePoint(0.3, -0.2));
  const State phi2 = State::hermite(eps, MultiIndex::single(2));
  for (const State& s : {g, phi2}) {
    const PhasePoint c = s.phase_center();
    for (int j = 0; j <= 3; ++j) {
      const MultiIndex k = MultiIndex::single(j);
      if (!spectro::detail::has_spectrogram_closed_form(s, k)) continue;
      const double mass = box_integral(
          [&](const PhasePoint& z) { return spectrogram(s, k, z, quad); }, c.q[0] - R, c.q[0] + R,
          c.p[0] - R, c.p[0] + R, 10);
      CHECK(mass == Catch::Approx(1.0).margin(1e-6));
    }
  }
  // Quadrature path (Hermite state, first-order window): same tolerance.
  const double mass_q = box_integral(
      [&](const PhasePoint& z) {
        return spectrogram(phi2, MultiIndex::single(1), z, quad);
      },
      -R, R, -R, R, 10);
  CHECK(mass_q == Catch::Approx(1.0).margin(1e-6));

  // Hat state via the Sobol path: limited by the n = 1000 inner quadrature.
  const State hat = State::hat(eps, 0.0);
  const QuadratureSpec qmc{QuadKind::qmc_sobol, 1000, 0, 0};
  const double mass_hat = box_integral(
      [&](const PhasePoint& z) { return spectrogram(hat, MultiIndex::single(0), z, qmc); }, -R, R,
      -R, R, 8);
  CHECK(mass_hat == Catch::Approx(1.0).margin(2e-3));
}

TEST_CASE("mu density closed forms") {
  const double eps = 0.09;
  const PhasePoint w(0.25, -0.6);
  const State g = State::gaussian(eps, w);
  QuadratureSpec quad;

  // N = 1 is the Husimi function.
  const PhasePoint z(0.4, -0.5);
  CHECK(mu_density(g, 1, z, quad) == Catch::Approx(husimi(g, z, quad)).epsilon(1e-13));

  // N = 2: (2 pi eps)^{-1} e^{-r}(3/2 - r/2), r = |z-w|^2/(2 eps).
  const double r = (z - w).squared_norm() / (2 * eps);
  CHECK(mu_density(g, 2, z, quad) ==
        Catch::Approx(std::pow(2 * kPi * eps, -1) * std::exp(-r) * (1.5 - 0.5 * r)).epsilon(1e-12));

  // N = 3 at the center.
  CHECK(mu_density(g, 3, w, quad) ==
        Catch::Approx(std::pow(2 * kPi * eps, -1) * 1.75).epsilon(1e-12));

  // N = 4 at |z - w|^2/(2 eps) = 1 via the Laplacian route.
  const PhasePoint z1(w.q[0] + std::sqrt(2 * eps), w.p[0]);
  const double expect =
      std::pow(2 * kPi * eps, -1) * std::exp(-1.0) * (15.0 / 8 - 11.0 / 8 + 5.0 / 16 - 1.0 / 48);
  CHECK(mu_density_via_laplacians(g, 4, z1) == Catch::Approx(expect).epsilon(1e-12));
  CHECK(mu_density(g, 4, z1, quad) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("mu density routes agree for Gaussian packets") {
  const double eps = 0.05;
  const PhasePoint w(0.1, 0.7);
  const State g = State::gaussian(eps, w);
  QuadratureSpec quad;
  std::mt19937_64 rng(777213);
  std::uniform_real_distribution<double> u(-2 * std::sqrt(eps), 2 * std::sqrt(eps));
  for (int N = 1; N <= 4; ++N) {
    double max_diff = 0.0, max_ref = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const PhasePoint z(w.q[0] + u(rng), w.p[0] + u(rng));
      const double direct = mu_density(g, N, z, quad);
      const double via_lap = mu_density_via_laplacians(g, N, z);
      max_diff = std::max(max_diff, std::abs(direct - via_lap));
      max_ref = std::max(max_ref, std::abs(via_lap));
    }
    CHECK(max_diff <= 1e-8 * max_ref);
  }
}

TEST_CASE("mu density quadrature path agrees with closed forms in 2D") {
  const double eps = 0.1;
  const PhasePoint w({0.1, -0.2}, {0.3, 0.0});
  const State g = State::gaussian(eps, w);
  QuadratureSpec quad;
  std::mt19937_64 rng(4040);
  std::uniform_real_distribution<double> u(-std::sqrt(eps), std::sqrt(eps));
  for (int N : {2, 3}) {
    double max_diff = 0.0, max_ref = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      PhasePoint z = w;
      for (int j = 0; j < 2; ++j) {
        z.q[j] += u(rng);
        z.p[j] += u(rng);
      }
      const double closed = mu_density(g, N, z, quad, false);
      const double via_quad = mu_density(g, N, z, quad, true);
      max_diff = std::max(max_diff, std::abs(closed - via_quad));
      max_ref = std::max(max_ref, std::abs(closed));
    }
    CHECK(max_diff <= 1e-6 * max_ref);
  }
}

TEST_CASE("signed mass of mu is one") {
  const double eps = 0.06;
  QuadratureSpec quad;
  const double R = 8 * std::sqrt(eps);

  const State g = State::gaussian(eps, PhasePoint(0.2, 0.1));
  for (int N = 1; N <= 4; ++N) {
    const double mass = box_integral(
        [&](const PhasePoint& z) { return mu_density(g, N, z, quad); }, 0.2 - R, 0.2 + R, 0.1 - R,
        0.1 + R, 10);
    CHECK(mass == Catch::Approx(1.0).margin(1e-6));
  }

  // Generic quadrature path: Hermite state, N = 2.
  const State phi1 = State::hermite(eps, MultiIndex::single(1));
  const double mass_h = box_integral(
      [&](const PhasePoint& z) { return mu_density(phi1, 2, z, quad); }, -R, R, -R, R, 10);
  CHECK(mass_h == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("signed density components") {
  const double eps = 0.07;
  const State g = State::gaussian(eps, PhasePoint(0.0, 0.0));
  QuadratureSpec quad;
  const auto sd = SignedDensity::make(g, 3, quad);
  REQUIRE(sd.components.size() == 3);
  CHECK(sd.components[0].weight == 1.75);
  CHECK(sd.components[1].weight == -1.0);
  CHECK(sd.components[2].weight == 0.25);
  for (const auto& c : sd.components) CHECK(c.multiplicity == 1);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-std::sqrt(eps), std::sqrt(eps));
  for (int trial = 0; trial < 10; ++trial) {
    const PhasePoint z(u(rng), u(rng));
    CHECK(sd.evaluate(z) == Catch::Approx(mu_density(g, 3, z, quad)).margin(1e-12));
    // Component targets are nonnegative probability densities.
    for (const auto& c : sd.components) CHECK(c.averaged_spectrogram(z) >= 0.0);
  }
}

TEST_CASE("rho variables") {
  const Rho rho{0.5};
  const auto r = rho(PhasePoint({1.0, 0.0}, {0.0, 2.0}));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == Catch::Approx(2.0 * 1.0 / 0.5));
  CHECK(r[1] == Catch::Approx(2.0 * 4.0 / 0.5));
}
