#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectro/multi_index.hpp"

namespace spectro {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact binomial coefficient; 0 for k < 0 or k > n.
inline BigInt binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline long double to_long_double(const Rational& r) { return r.convert_to<long double>(); }

/// L_n(x) by the three-term recurrence
///   (n+1) L_{n+1}(x) = (2n+1-x) L_n(x) - n L_{n-1}(x),  L_0 = 1, L_1 = 1-x.
template <class Real = double>
Real laguerre(int n, Real x) {
  if (n < 0) throw std::invalid_argument("laguerre: n < 0");
  if (n == 0) return Real(1);
  Real lm = Real(1);       // L_0
  Real l = Real(1) - x;    // L_1
  for (int m = 1; m < n; ++m) {
    Real lp = ((Real(2 * m + 1) - x) * l - Real(m) * lm) / Real(m + 1);
    lm = l;
    l = lp;
  }
  return l;
}

namespace detail {

inline constexpr int hermite_order_cap = 60;  // per axis

/// Orthonormal 1D Hermite functions on the unit scale,
///   u_n(t) = pi^{-1/4} (2^n n!)^{-1/2} H_n(t) e^{-t^2/2},
/// for n = 0..n_max written into out (size n_max+1). The recurrence acts on the
/// normalized functions directly, so no factorial ever materializes.
template <class Real = double>
void hermite_unit_values(int n_max, Real t, std::span<Real> out) {
  if (n_max < 0 || n_max > hermite_order_cap)
    throw std::domain_error("hermite: order " + std::to_string(n_max) + " exceeds cap " +
                            std::to_string(hermite_order_cap));
  const Real u0 = Real(0.75112554446494248285870300477623L) * std::exp(-t * t / 2);  // pi^{-1/4}
  out[0] = u0;
  if (n_max == 0) return;
  out[1] = std::sqrt(Real(2)) * t * u0;
  for (int n = 1; n < n_max; ++n)
    out[n + 1] = std::sqrt(Real(2) / (n + 1)) * t * out[n] - std::sqrt(Real(n) / (n + 1)) * out[n - 1];
}

/// Same recurrence without the Gaussian factor:
///   h_n(t) = u_n(t) e^{+t^2/2} = pi^{-1/4} (2^n n!)^{-1/2} H_n(t).
/// Used where a quadrature weight already carries the Gaussian.
template <class Real = double>
void hermite_unit_poly_values(int n_max, Real t, std::span<Real> out) {
  if (n_max < 0 || n_max > hermite_order_cap)
    throw std::domain_error("hermite: order " + std::to_string(n_max) + " exceeds cap " +
                            std::to_string(hermite_order_cap));
  const Real h0 = Real(0.75112554446494248285870300477623L);
  out[0] = h0;
  if (n_max == 0) return;
  out[1] = std::sqrt(Real(2)) * t * h0;
  for (int n = 1; n < n_max; ++n)
    out[n + 1] = std::sqrt(Real(2) / (n + 1)) * t * out[n] - std::sqrt(Real(n) / (n + 1)) * out[n - 1];
}

}  // namespace detail

/// phi_k(x) = prod_j (pi eps)^{-1/4} (2^{k_j} k_j!)^{-1/2} H_{k_j}(x_j/sqrt(eps)) e^{-x_j^2/(2 eps)}.
/// These are the eps-rescaled harmonic oscillator eigenfunctions; phi_0 is the
/// Gaussian wave packet centered at the origin. Real-valued.
inline double hermite_function(const MultiIndex& k, double eps, std::span<const double> x) {
  if (eps <= 0) throw std::invalid_argument("hermite_function: eps <= 0");
  if (k.dim() != static_cast<int>(x.size()))
    throw std::invalid_argument("hermite_function: dimension mismatch");
  const double rt_eps = std::sqrt(eps);
  double val = 1.0;
  std::vector<double> buf;
  for (int j = 0; j < k.dim(); ++j) {
    buf.resize(k[j] + 1);
    detail::hermite_unit_values<double>(k[j], x[j] / rt_eps, buf);
    val *= buf[k[j]] / std::sqrt(rt_eps);  // eps^{-1/4} per axis
  }
  return val;
}

/// Signed-weight expansion data for the order-N spectrogram combination:
/// c[j] = C_{N-1,j} = sum_{m=j}^{N-1} 2^{-m} binom(d-1+m, d-1+j), consumed with
/// sign (-1)^j, and multiplicity m_j = binom(j+d-1, d-1) = #{k : |k| = j}.
struct ExpansionCoefficients {
  int dim = 1;
  int order = 1;
  std::vector<Rational> c;
  std::vector<long> multiplicity;

  /// Signed floating weight (-1)^j C_{N-1,j}.
  double weight(int j) const { return (j % 2 ? -1.0 : 1.0) * to_double(c[j]); }
  long mult(int j) const { return multiplicity[j]; }
};

inline ExpansionCoefficients expansion_coefficients(int d, int N) {
  if (d < 1 || N < 1) throw std::invalid_argument("expansion_coefficients: need d >= 1, N >= 1");
  ExpansionCoefficients ec;
  ec.dim = d;
  ec.order = N;
  ec.c.resize(N);
  ec.multiplicity.resize(N);
  for (int j = 0; j < N; ++j) {
    Rational cj = 0;
    for (int m = j; m <= N - 1; ++m) {
      BigInt two_m = BigInt(1) << m;
      cj += Rational(binomial(d - 1 + m, d - 1 + j), two_m);
    }
    ec.c[j] = cj;
    ec.multiplicity[j] = static_cast<long>(binomial(j + d - 1, d - 1));
  }
  return ec;
}

/// Coefficients of the Laguerre-product expansion of iterated phase-space
/// Laplacians of the Gaussian W_{g_0}:
///   (-eps/2 Lap)^N W_{g_0}(z) = W_{g_0}(z) sum_{|k| <= N} coeff(|k|) L_{k_1}(rho_1)...L_{k_d}(rho_d),
/// with rho_j = 2(q_j^2 + p_j^2)/eps. The coefficient depends on k only through
/// the level n = |k| and equals N! binom(N+d-1, n+d-1).
struct LaplaceLaguerreExpansion {
  int dim = 1;
  int power = 0;
  std::vector<Rational> level_coeff;  // index n = 0..N

  const Rational& coeff(const MultiIndex& k) const { return level_coeff.at(k.order()); }

  /// Evaluate sum over all |k| <= N of coeff * prod_j L_{k_j}(rho_j).
  double evaluate(std::span<const double> rho) const {
    const int d = dim;
    // Per-axis Laguerre values L_0..L_N.
    std::vector<std::vector<double>> lag(d, std::vector<double>(power + 1));
    for (int j = 0; j < d; ++j)
      for (int n = 0; n <= power; ++n) lag[j][n] = laguerre(n, rho[j]);
    double total = 0.0;
    for (int n = 0; n <= power; ++n) {
      double level_sum = 0.0;
      for (const auto& k : multi_indices(d, n)) {
        double prod = 1.0;
        for (int j = 0; j < d; ++j) prod *= lag[j][k[j]];
        level_sum += prod;
      }
      total += to_double(level_coeff[n]) * level_sum;
    }
    return total;
  }
};

inline LaplaceLaguerreExpansion laplace_laguerre(int d, int N) {
  if (d < 1 || N < 0) throw std::invalid_argument("laplace_laguerre: need d >= 1, N >= 0");
  LaplaceLaguerreExpansion ex;
  ex.dim = d;
  ex.power = N;
  ex.level_coeff.resize(N + 1);
  BigInt nfact = 1;
  for (int i = 2; i <= N; ++i) nfact *= i;
  for (int n = 0; n <= N; ++n) ex.level_coeff[n] = Rational(nfact * binomial(N + d - 1, n + d - 1));
  return ex;
}

/// Exact-arithmetic check of the identity
///   sum_{j=0}^{N-m} binom(N-j, m) binom(k+j, j) = binom(N+k+1, N-m).
/// Exists as a test oracle for the combinatorial bookkeeping.
inline bool binomial_identity_check(int N, int m, int k) {
  if (m < 0 || m > N || k < 0) throw std::invalid_argument("binomial_identity_check: bad args");
  BigInt lhs = 0;
  for (int j = 0; j <= N - m; ++j) lhs += binomial(N - j, m) * binomial(k + j, j);
  return lhs == binomial(N + k + 1, N - m);
}

}  // namespace spectro
