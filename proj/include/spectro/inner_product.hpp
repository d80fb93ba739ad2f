#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "spectro/quadrature.hpp"
#include "spectro/states.hpp"

namespace spectro {

namespace detail {

/// Allocation-free pointwise evaluator for a state (superpositions flattened).
class StateEval {
 public:
  explicit StateEval(const State& s) : eps_(s.eps()), dim_(s.dim()) {
    std::vector<FlatTerm> terms;
    flatten(s, 1.0, terms);
    for (const auto& t : terms) terms_.push_back({t.coeff, axis_factors(*t.base)});
  }

  std::complex<double> operator()(std::span<const double> x) const {
    std::complex<double> acc = 0.0;
    for (const auto& [c, factors] : terms_) {
      std::complex<double> v = c;
      for (int j = 0; j < dim_ && v != 0.0; ++j) v *= eval_factor(factors[j], x[j]);
      acc += v;
    }
    return acc;
  }

 private:
  std::complex<double> eval_factor(const AxisFactor& f, double x) const {
    if (f.kind == AxisFactor::Kind::hermite) {
      std::array<double, hermite_order_cap + 1> buf;
      hermite_unit_values<double>(f.n, x / std::sqrt(eps_), std::span<double>(buf.data(), f.n + 1));
      return buf[f.n] / std::sqrt(std::sqrt(eps_));
    }
    return eval_axis_factor(f, eps_, x);
  }

  double eps_;
  int dim_;
  std::vector<std::pair<std::complex<double>, std::vector<AxisFactor>>> terms_;
};

/// Standard-normal draws xi (n x d) with QMC weight factors exp(|xi|^2/4)/n,
/// shared by the qmc_sobol and monte_carlo windowed-integral paths.
struct GaussianNodeTable {
  long n = 0;
  int dim = 1;
  std::vector<double> xi;      // n x d
  std::vector<double> weight;  // n, = exp(|xi_i|^2 / 4) / n
};

inline GaussianNodeTable make_sobol_gaussian_table(long n, int d) {
  GaussianNodeTable tab;
  tab.n = n;
  tab.dim = d;
  tab.xi.resize(n * d);
  tab.weight.resize(n);
  // The Sobol sequence starts at the origin, which the normal quantile cannot
  // map; the integration lattice uses points 1..n.
  NodeSet u = sobol_nodes(n + 1, d);
  for (long i = 0; i < n; ++i) {
    double s2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = normal_quantile(u.points[(i + 1) * d + j]);
      tab.xi[i * d + j] = v;
      s2 += v * v;
    }
    tab.weight[i] = std::exp(0.25 * s2) / static_cast<double>(n);
  }
  return tab;
}

inline std::shared_ptr<const GaussianNodeTable> sobol_gaussian_table(long n, int d) {
  static std::map<std::pair<long, int>, std::shared_ptr<const GaussianNodeTable>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, d);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_shared<GaussianNodeTable>(make_sobol_gaussian_table(n, d))).first;
  return it->second;
}

inline GaussianNodeTable make_mc_gaussian_table(long n, int d, std::uint64_t stream) {
  GaussianNodeTable tab;
  tab.n = n;
  tab.dim = d;
  tab.xi.resize(n * d);
  tab.weight.resize(n);
  Rng rng(stream);
  for (long i = 0; i < n; ++i) {
    double s2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = rng.normal();
      tab.xi[i * d + j] = v;
      s2 += v * v;
    }
    tab.weight[i] = std::exp(0.25 * s2) / static_cast<double>(n);
  }
  return tab;
}

}  // namespace detail

/// <psi, T_z phi_k> = int psi(x) conj((T_z phi_k)(x)) dx for every k in ks,
/// sharing state evaluations and per-axis Hermite recurrences across windows.
///
/// gauss_hermite absorbs the windows' Gaussian factor e^{-|x-q|^2/(2 eps)}
/// into the rule weight; qmc_sobol / monte_carlo draw x = q + sqrt(eps/2) xi
/// with xi standard normal (inverse-CDF-mapped Sobol points, resp. a
/// counter-seeded pseudo-random stream) and correct by the importance weight.
///
/// If underresolved is given, it is set when the node count looks too small
/// for the largest requested window order.
inline std::vector<std::complex<double>> window_inner_products(
    const State& s, const PhasePoint& z, std::span<const MultiIndex> ks, const QuadratureSpec& quad,
    bool* underresolved = nullptr) {
  const int d = s.dim();
  const double eps = s.eps();
  if (z.dim() != d) throw std::invalid_argument("window_inner_products: dim mismatch");
  std::vector<int> kmax(d, 0);
  for (const auto& k : ks) {
    if (k.dim() != d) throw std::invalid_argument("window_inner_products: window dim mismatch");
    for (int j = 0; j < d; ++j) kmax[j] = std::max(kmax[j], k[j]);
  }
  const detail::StateEval psi(s);
  std::vector<std::complex<double>> out(ks.size(), 0.0);
  const double inv_eps = 1.0 / eps;

  if (quad.kind == QuadKind::gauss_hermite) {
    if (d > 3) throw std::invalid_argument("window_inner_products: gauss_hermite limited to d <= 3");
    // In the rescaled rule variable the integrand oscillates with frequency
    // |z.p - p_term| sqrt(2/eps) and peaks offset by |z.q - q_term|/sqrt(2 eps).
    // A fixed-size rule aliases once the bulk node spacing (~pi/sqrt(2n))
    // stops resolving that, so the per-axis node count grows with the state
    // terms, capped at the 200-node table limit. Terms needing more than the
    // cap have overlap below e^{-29} and are dropped; if every term is
    // dropped the inner products are returned as zero.
    std::vector<detail::FlatTerm> terms;
    detail::flatten(s, 1.0, terms);
    std::vector<double> need(d, 0.0);
    bool any_alive = false;
    for (const auto& term : terms) {
      const auto factors = detail::axis_factors(*term.base);
      std::vector<double> tneed(d, 0.0);
      bool alive = true;
      for (int j = 0; j < d; ++j) {
        const auto& f = factors[j];
        const double cq = f.kind == detail::AxisFactor::Kind::gaussian ? f.q
                          : f.kind == detail::AxisFactor::Kind::hat    ? f.hat_q
                                                                       : 0.0;
        const double cp = f.kind == detail::AxisFactor::Kind::gaussian ? f.p : 0.0;
        const double spread =
            f.kind == detail::AxisFactor::Kind::hermite ? std::sqrt(2.0 * f.n + 1.0) : 1.0;
        const double osc = std::abs(z.p[j] - cp) * std::sqrt(2.0 / eps);
        const double shift = std::abs(z.q[j] - cq) / std::sqrt(2.0 * eps) + 3.0 * spread;
        tneed[j] = std::max(0.85 * osc * osc + 16.0, 0.5 * (shift + 4.0) * (shift + 4.0) + 8.0);
        alive = alive && tneed[j] <= 200.0;
      }
      if (alive) {
        any_alive = true;
        for (int j = 0; j < d; ++j) need[j] = std::max(need[j], tneed[j]);
      }
    }
    if (!any_alive) return out;
    std::vector<int> n_axis(d);
    for (int j = 0; j < d; ++j)
      n_axis[j] = std::min(200, std::max(quad.nodes, static_cast<int>(std::ceil(need[j]))));
    if (underresolved) {
      *underresolved = false;
      for (int j = 0; j < d; ++j)
        *underresolved = *underresolved || kmax[j] >= n_axis[j];
    }
    const double scale = std::sqrt(2.0 * eps);  // rule weight e^{-|x-q|^2/(2 eps)}
    // Per-axis nodes, weights, and tables of Gaussian-free Hermite values.
    std::vector<const std::vector<double>*> t(d), w(d);
    std::vector<std::vector<double>> herm(d);
    for (int j = 0; j < d; ++j) {
      const auto& rule = detail::gauss_hermite_unit_cached<double>(n_axis[j]);
      t[j] = &rule.first;
      w[j] = &rule.second;
      herm[j].resize(static_cast<size_t>(n_axis[j]) * (kmax[j] + 1));
      for (int l = 0; l < n_axis[j]; ++l)
        detail::hermite_unit_poly_values<double>(
            kmax[j], std::sqrt(2.0) * (*t[j])[l],
            std::span<double>(herm[j].data() + static_cast<size_t>(l) * (kmax[j] + 1), kmax[j] + 1));
    }
    const double amp = std::pow(eps, -0.25 * d);
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    long total = 1;
    for (int j = 0; j < d; ++j) total *= n_axis[j];
    for (long i = 0; i < total; ++i) {
      double wt = amp, phase = 0.0;
      for (int j = 0; j < d; ++j) {
        x[j] = z.q[j] + scale * (*t[j])[idx[j]];
        wt *= scale * (*w[j])[idx[j]];
        phase -= z.p[j] * (x[j] - 0.5 * z.q[j]);
      }
      const std::complex<double> base = psi(x) * std::polar(wt, phase * inv_eps);
      if (base != 0.0) {
        for (size_t m = 0; m < ks.size(); ++m) {
          double h = 1.0;
          for (int j = 0; j < d; ++j)
            h *= herm[j][static_cast<size_t>(idx[j]) * (kmax[j] + 1) + ks[m][j]];
          out[m] += base * h;
        }
      }
      for (int j = d - 1; j >= 0; --j) {
        if (++idx[j] < n_axis[j]) break;
        idx[j] = 0;
      }
    }
    return out;
  }

  // QMC / MC path.
  const long n = quad.nodes;
  if (underresolved) {
    int ord = 0;
    for (const auto& k : ks) ord = std::max(ord, k.order());
    *underresolved = n < 50l * (ord + 1);
  }
  std::shared_ptr<const detail::GaussianNodeTable> tab;
  if (quad.kind == QuadKind::qmc_sobol) {
    tab = detail::sobol_gaussian_table(n, d);
  } else {
    tab = std::make_shared<detail::GaussianNodeTable>(
        detail::make_mc_gaussian_table(n, d, detail::derive_stream(quad.rng_seed, quad.call_index)));
  }
  const double sigma = std::sqrt(0.5 * eps);
  const double inv_sqrt2 = 0.70710678118654752440;
  // (pi eps)^{d/2} from the importance density times eps^{-d/4} from phi_k.
  const double c0 = std::pow(3.14159265358979323846 * eps, 0.5 * d) * std::pow(eps, -0.25 * d);
  std::vector<double> x(d);
  std::vector<std::array<double, detail::hermite_order_cap + 1>> hbuf(d);
  for (long i = 0; i < n; ++i) {
    double phase = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] = z.q[j] + sigma * tab->xi[i * d + j];
      phase -= z.p[j] * (x[j] - 0.5 * z.q[j]);
    }
    const std::complex<double> pv = psi(x);
    if (pv == 0.0) continue;
    const std::complex<double> base = pv * std::polar(c0 * tab->weight[i], phase * inv_eps);
    for (int j = 0; j < d; ++j)
      detail::hermite_unit_poly_values<double>(
          kmax[j], tab->xi[i * d + j] * inv_sqrt2,
          std::span<double>(hbuf[j].data(), kmax[j] + 1));
    for (size_t m = 0; m < ks.size(); ++m) {
      double h = 1.0;
      for (int j = 0; j < d; ++j) h *= hbuf[j][ks[m][j]];
      out[m] += base * h;
    }
  }
  return out;
}

/// Single-window convenience wrapper.
inline std::complex<double> inner_product_with_window(const State& s, const PhasePoint& z,
                                                      const MultiIndex& k, const QuadratureSpec& quad,
                                                      bool* underresolved = nullptr) {
  const MultiIndex ks[1] = {k};
  return window_inner_products(s, z, std::span<const MultiIndex>(ks, 1), quad, underresolved)[0];
}

/// Quadrature choice the experiments default to: Gauss-Hermite for smooth
/// states in low dimension, Sobol QMC for the non-smooth hat, Monte Carlo as
/// the high-dimensional fallback.
inline QuadratureSpec default_quadrature(const State& s, std::uint64_t seed = 0) {
  QuadratureSpec q;
  q.rng_seed = seed;
  bool has_hat = s.is_hat();
  if (const auto* sp = std::get_if<Superposition>(&s.payload()))
    for (const auto& part : sp->parts) has_hat = has_hat || part.is_hat();
  if (has_hat) {
    q.kind = QuadKind::qmc_sobol;
    q.nodes = 1000;
  } else if (s.dim() <= 2) {
    q.kind = QuadKind::gauss_hermite;
    q.nodes = 40;
  } else {
    q.kind = QuadKind::monte_carlo;
    q.nodes = 4000;
  }
  return q;
}

}  // namespace spectro
