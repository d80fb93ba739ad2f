#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectro/detail/sobol_table.hpp"

namespace spectro {

enum class QuadKind { gauss_hermite, qmc_sobol, monte_carlo };

inline std::string to_string(QuadKind k) {
  switch (k) {
    case QuadKind::gauss_hermite: return "gauss_hermite";
    case QuadKind::qmc_sobol: return "qmc_sobol";
    case QuadKind::monte_carlo: return "monte_carlo";
  }
  return "?";
}

inline QuadKind quad_kind_from_string(const std::string& s) {
  if (s == "gauss_hermite") return QuadKind::gauss_hermite;
  if (s == "qmc_sobol") return QuadKind::qmc_sobol;
  if (s == "monte_carlo") return QuadKind::monte_carlo;
  throw std::invalid_argument("unknown quadrature kind: " + s);
}

/// How inner products and norms are discretized. For gauss_hermite, nodes is
/// the per-axis count; for qmc_sobol / monte_carlo it is the total count.
/// call_index separates Monte Carlo streams between calls so that concurrent
/// evaluation stays reproducible.
struct QuadratureSpec {
  QuadKind kind = QuadKind::gauss_hermite;
  int nodes = 40;
  std::uint64_t rng_seed = 0;
  std::uint64_t call_index = 0;

  QuadratureSpec with_call_index(std::uint64_t i) const {
    QuadratureSpec q = *this;
    q.call_index = i;
    return q;
  }
};

/// Nodes x_i in R^d with weights, stored row-major (n x d).
struct NodeSet {
  int dim = 1;
  std::vector<double> points;   // size n*dim
  std::vector<double> weights;  // size n

  long size() const { return static_cast<long>(weights.size()); }
  std::span<const double> point(long i) const { return {points.data() + i * dim, static_cast<size_t>(dim)}; }
};

namespace detail {

/// splitmix64; used to derive independent RNG streams from (seed, index).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(0x517cc1b727220a95ull + index));
}

/// Deterministic uniform/normal draws on top of mt19937_64. The mapping from
/// engine output to doubles is written out so that results do not depend on
/// library-specific distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // in [0,1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller, one fresh pair per two calls
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform01(); } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Gauss-Hermite nodes/weights for weight e^{-t^2}: Golub-Welsch eigenvalues
/// of the symmetric tridiagonal Jacobi matrix (off-diagonals sqrt(i/2)) as
/// seeds, polished by Newton steps on the orthonormal Hermite recurrence, with
/// weights w_i = 2 / (sqrt(2n) h_{n-1}(t_i))^2.
template <class Real>
std::pair<std::vector<Real>, std::vector<Real>> gauss_hermite_unit(int n) {
  if (n < 1 || n > 200) throw std::invalid_argument("gauss_hermite: need 1 <= n <= 200");
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  Mat J = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const Real b = std::sqrt(Real(i) / Real(2));
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolver failed");
  // Orthonormal (Gaussian-free) Hermite values h_0..h_n at x.
  const Real quarter_pi = Real(0.75112554446494248285870300477623L);  // pi^{-1/4}
  auto eval = [n, quarter_pi](Real x, Real& hn, Real& hnm1) {
    Real p0 = quarter_pi, p1 = std::sqrt(Real(2)) * x * quarter_pi;
    for (int k = 1; k < n; ++k) {
      const Real p2 = std::sqrt(Real(2) / (k + 1)) * x * p1 - std::sqrt(Real(k) / (k + 1)) * p0;
      p0 = p1;
      p1 = p2;
    }
    hn = p1;
    hnm1 = p0;
  };
  std::vector<Real> t(n), w(n);
  for (int i = 0; i < n; ++i) {
    Real x = es.eigenvalues()(i);
    Real hn = 0, hnm1 = 0;
    for (int it = 0; it < 3; ++it) {
      eval(x, hn, hnm1);
      const Real dh = std::sqrt(Real(2) * n) * hnm1;
      const Real dx = hn / dh;
      x -= dx;
      if (std::abs(dx) <= std::abs(x) * std::numeric_limits<Real>::epsilon()) break;
    }
    eval(x, hn, hnm1);
    const Real dh = std::sqrt(Real(2) * n) * hnm1;
    t[i] = x;
    w[i] = Real(2) / (dh * dh);
  }
  // The rule is symmetric about 0; enforce it exactly.
  for (int i = 0; i < n / 2; ++i) {
    const int m = n - 1 - i;
    const Real node = (t[m] - t[i]) / 2;
    t[i] = -node;
    t[m] = node;
    const Real wt = (w[i] + w[m]) / 2;
    w[i] = wt;
    w[m] = wt;
  }
  if (n % 2) t[n / 2] = Real(0);
  return {std::move(t), std::move(w)};
}

template <class Real>
const std::pair<std::vector<Real>, std::vector<Real>>& gauss_hermite_unit_cached(int n) {
  static std::map<int, std::pair<std::vector<Real>, std::vector<Real>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_hermite_unit<Real>(n)).first;
  return it->second;
}

}  // namespace detail

/// Tensorized n-per-axis Gauss-Hermite rule rescaled so that
///   sum_i w_i f(x_i) ~ int f(x) e^{-|x-center|^2/eps} dx.
inline NodeSet gauss_hermite_rule(int n, double eps, std::span<const double> center, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("gauss_hermite_rule: tensor grid limited to d <= 3");
  if (eps <= 0) throw std::invalid_argument("gauss_hermite_rule: eps <= 0");
  const auto& [t, w] = detail::gauss_hermite_unit_cached<double>(n);
  const double scale = std::sqrt(eps);
  long total = 1;
  for (int j = 0; j < d; ++j) total *= n;
  NodeSet ns;
  ns.dim = d;
  ns.points.resize(total * d);
  ns.weights.assign(total, 1.0);
  std::vector<int> idx(d, 0);
  for (long i = 0; i < total; ++i) {
    double wt = 1.0;
    for (int j = 0; j < d; ++j) {
      ns.points[i * d + j] = center[j] + scale * t[idx[j]];
      wt *= scale * w[idx[j]];
    }
    ns.weights[i] = wt;
    for (int j = d - 1; j >= 0; --j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
  }
  return ns;
}

/// First n points of the Sobol sequence in [0,1)^d (Gray-code order, first
/// point at the origin), weights 1/n.
inline NodeSet sobol_nodes(long n, int d) {
  if (d < 1 || d > detail::sobol_max_dim)
    throw std::invalid_argument("sobol_nodes: dimension exceeds direction-number table");
  if (n < 1 || n > (1l << 31)) throw std::invalid_argument("sobol_nodes: need 1 <= n <= 2^31");
  constexpr int bits = 31;
  // v[j][b] = direction integer b (0-based) for axis j, scaled to 31 bits.
  std::vector<std::array<std::uint32_t, bits>> v(d);
  for (int j = 0; j < d; ++j) {
    const auto& row = detail::sobol_polys[j];
    const int s = row.degree;
    if (s == 0) {  // dimension 1: van der Corput
      for (int b = 0; b < bits; ++b) v[j][b] = 1u << (bits - 1 - b);
      continue;
    }
    for (int b = 0; b < std::min(s, bits); ++b) v[j][b] = row.m[b] << (bits - 1 - b);
    for (int b = s; b < bits; ++b) {
      std::uint32_t x = v[j][b - s] ^ (v[j][b - s] >> s);
      for (int i = 1; i < s; ++i)
        if ((row.poly >> (s - i)) & 1u) x ^= v[j][b - i];
      v[j][b] = x;
    }
  }
  NodeSet ns;
  ns.dim = d;
  ns.points.assign(n * d, 0.0);
  ns.weights.assign(n, 1.0 / static_cast<double>(n));
  std::vector<std::uint32_t> x(d, 0);
  const double fac = 1.0 / static_cast<double>(1ull << bits);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ns.points[i * d + j] = x[j] * fac;
    // Flip the bit given by the lowest zero bit of i (Gray-code step).
    std::uint64_t m = i;
    int c = 0;
    while (m & 1ull) {
      m >>= 1;
      ++c;
    }
    if (c < bits)
      for (int j = 0; j < d; ++j) x[j] ^= v[j][c];
  }
  return ns;
}

/// Inverse standard normal CDF (Wichura's AS241, double precision).
inline double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u must be in (0,1)");
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r + 6.7265770927008700853e4) * r +
                4.5921953931549871457e4) * r + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r + 3.9307895800092710610e4) * r +
                2.1213794301586595867e4) * r + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
               1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
               1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
               2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
               7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace spectro
