#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "spectro/inner_product.hpp"
#include "spectro/multi_index.hpp"
#include "spectro/phase_point.hpp"
#include "spectro/specfun.hpp"
#include "spectro/states.hpp"

namespace spectro {

inline constexpr double pi_const = 3.14159265358979323846;

/// rho_j(q,p) = 2 (q_j^2 + p_j^2) / eps, the radial phase-space variables.
struct Rho {
  double eps = 1.0;
  std::vector<double> operator()(const PhasePoint& z) const {
    std::vector<double> r(z.dim());
    for (int j = 0; j < z.dim(); ++j) r[j] = 2.0 * z.axis_squared_norm(j) / eps;
    return r;
  }
};

/// W_{phi_k}(z) = (pi eps)^{-d} e^{-|z|^2/eps} (-1)^{|k|} prod_j L_{k_j}(2|z_j|^2/eps),
/// and the Gaussian case as k = 0 recentered at the packet's center.
inline double wigner_closed_form(const State& s, const PhasePoint& z) {
  const int d = s.dim();
  const double eps = s.eps();
  if (z.dim() != d) throw std::invalid_argument("wigner_closed_form: dim mismatch");
  const double norm = std::pow(pi_const * eps, -d);
  if (const auto* g = std::get_if<GaussianPacket>(&s.payload())) {
    const PhasePoint u = z - g->center;
    return norm * std::exp(-u.squared_norm() / eps);
  }
  if (const auto* h = std::get_if<HermiteState>(&s.payload())) {
    double val = norm * std::exp(-z.squared_norm() / eps);
    if (h->k.order() % 2) val = -val;
    for (int j = 0; j < d; ++j) val *= laguerre(h->k[j], 2.0 * z.axis_squared_norm(j) / eps);
    return val;
  }
  throw std::invalid_argument("wigner_closed_form: only Gaussian and Hermite states have one");
}

namespace detail {

/// Effective position support [lo, hi] of a 1D state plus its kink locations.
inline void support_1d(const State& s, double& lo, double& hi, std::vector<double>& kinks) {
  const double rt = std::sqrt(s.eps());
  std::vector<FlatTerm> terms;
  flatten(s, 1.0, terms);
  lo = 1e300;
  hi = -1e300;
  for (const auto& t : terms) {
    const auto f = axis_factors(*t.base).front();
    switch (f.kind) {
      case AxisFactor::Kind::hat:
        lo = std::min(lo, f.hat_q - rt);
        hi = std::max(hi, f.hat_q + rt);
        kinks.insert(kinks.end(), {f.hat_q - rt, f.hat_q, f.hat_q + rt});
        break;
      case AxisFactor::Kind::gaussian:
        lo = std::min(lo, f.q - 10 * rt);
        hi = std::max(hi, f.q + 10 * rt);
        break;
      case AxisFactor::Kind::hermite: {
        const double w = rt * (10 + 2 * std::sqrt(2.0 * f.n + 1.0));
        lo = std::min(lo, -w);
        hi = std::max(hi, w);
        break;
      }
    }
  }
}

}  // namespace detail

/// W_psi(q,p) = (2 pi eps)^{-1} int e^{i p y/eps} psi(q - y/2) conj(psi(q + y/2)) dy
/// by composite Gauss-Legendre over the effective y-support, split at kinks.
/// d = 1 only; the imaginary residual (W is real) is reported on request.
inline double wigner_numerical(const State& s, const PhasePoint& z, const QuadratureSpec& quad,
                               double* imag_residual = nullptr) {
  if (s.dim() != 1) throw std::invalid_argument("wigner_numerical: d = 1 only");
  const double eps = s.eps();
  double lo = 0, hi = 0;
  std::vector<double> kinks;
  detail::support_1d(s, lo, hi, kinks);
  // psi(q - y/2) needs q - y/2 in [lo,hi]; psi(q + y/2) needs q + y/2 in [lo,hi].
  const double q = z.q[0], p = z.p[0];
  const double ylo = std::max(2.0 * (q - hi), 2.0 * (lo - q));
  const double yhi = std::min(2.0 * (q - lo), 2.0 * (hi - q));
  if (imag_residual) *imag_residual = 0.0;
  if (yhi <= ylo) return 0.0;
  std::vector<double> breaks;
  for (double k : kinks) {
    breaks.push_back(2.0 * (q - k));  // kink seen by psi(q - y/2)
    breaks.push_back(2.0 * (k - q));  // kink seen by psi(q + y/2)
  }
  // Subdivide into panels fine enough for both the kinks and the e^{ipy/eps}
  // oscillation (16-point panels resolve a few wavelengths each).
  const int requested = std::max(quad.nodes, 256);
  int n_panels = std::max(16, requested / 16);
  const double wavelength = (std::abs(p) > 1e-300) ? 2 * pi_const * eps / std::abs(p) : 1e300;
  const double max_len = std::min((yhi - ylo) / n_panels, wavelength);
  breaks.push_back(ylo);
  breaks.push_back(yhi);
  std::sort(breaks.begin(), breaks.end());
  const detail::StateEval psi(s);
  const auto& [t, w] = detail::gauss_legendre_unit(16);
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = std::max(ylo, breaks[i]);
    double b = std::min(yhi, breaks[i + 1]);
    if (b <= a) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_len)));
    for (int c = 0; c < pieces; ++c) {
      const double ca = a + (b - a) * c / pieces;
      const double cb = a + (b - a) * (c + 1) / pieces;
      const double mid = 0.5 * (ca + cb), half = 0.5 * (cb - ca);
      for (size_t l = 0; l < t.size(); ++l) {
        const double y = mid + half * t[l];
        const double xm = q - 0.5 * y, xp = q + 0.5 * y;
        const std::complex<double> f =
            psi(std::span<const double>(&xm, 1)) * std::conj(psi(std::span<const double>(&xp, 1)));
        acc += half * w[l] * f * std::polar(1.0, p * y / eps);
      }
    }
  }
  acc /= 2 * pi_const * eps;
  if (imag_residual) *imag_residual = std::abs(acc.imag());
  return acc.real();
}

namespace detail {

/// S^{phi_k}_{g_w}(z) = S^{g_0}_{phi_k}(z - w) = (2 pi eps)^{-d} e^{-|u|^2/(2 eps)}
///                      prod_j (|u_j|^2/(2 eps))^{k_j} / k_j!,  u = z - w.
inline double gaussian_spectrogram_closed(const MultiIndex& k, double eps, const PhasePoint& u) {
  const int d = u.dim();
  double val = std::pow(2 * pi_const * eps, -d) * std::exp(-u.squared_norm() / (2 * eps));
  for (int j = 0; j < d; ++j) {
    const double r = u.axis_squared_norm(j) / (2 * eps);
    double fact = 1.0;
    for (int m = 2; m <= k[j]; ++m) fact *= m;
    val *= std::pow(r, k[j]) / fact;
  }
  return val;
}

inline bool has_spectrogram_closed_form(const State& s, const MultiIndex& k) {
  return s.is_gaussian() || (s.is_hermite() && k.order() == 0);
}

/// Which closed form, if any, covers the pair (state, window k).
inline std::optional<double> spectrogram_closed_form(const State& s, const MultiIndex& k,
                                                     const PhasePoint& z) {
  if (const auto* g = std::get_if<GaussianPacket>(&s.payload()))
    return gaussian_spectrogram_closed(k, s.eps(), z - g->center);
  if (const auto* h = std::get_if<HermiteState>(&s.payload()))
    if (k.order() == 0) return gaussian_spectrogram_closed(h->k, s.eps(), z);
  return std::nullopt;
}

}  // namespace detail

/// S^{phi_k}_psi(z) = (2 pi eps)^{-d} |<psi, T_z phi_k>|^2, dispatching to the
/// closed forms above when available. force_quadrature exists so tests can
/// cross-validate both paths.
inline double spectrogram(const State& s, const MultiIndex& k, const PhasePoint& z,
                          const QuadratureSpec& quad, bool force_quadrature = false) {
  if (!force_quadrature)
    if (auto cf = detail::spectrogram_closed_form(s, k, z)) return *cf;
  const auto ip = inner_product_with_window(s, z, k, quad);
  return std::pow(2 * pi_const * s.eps(), -s.dim()) * std::norm(ip);
}

/// Husimi function = spectrogram with the Gaussian window phi_0.
inline double husimi(const State& s, const PhasePoint& z, const QuadratureSpec& quad,
                     bool force_quadrature = false) {
  return spectrogram(s, MultiIndex::zero(s.dim()), z, quad, force_quadrature);
}

/// mu^N_psi(z) = sum_{j=0}^{N-1} (-1)^j C_{N-1,j} sum_{|k|=j} S^{phi_k}_psi(z).
inline double mu_density(const State& s, int N, const PhasePoint& z, const QuadratureSpec& quad,
                         bool force_quadrature = false) {
  if (N < 1 || N > 8) throw std::invalid_argument("mu_density: need 1 <= N <= 8");
  const int d = s.dim();
  const auto ec = expansion_coefficients(d, N);
  if (!force_quadrature && s.is_gaussian()) {
    double total = 0.0;
    for (int j = 0; j < N; ++j) {
      double sum_j = 0.0;
      for (const auto& k : multi_indices(d, j))
        sum_j += *detail::spectrogram_closed_form(s, k, z);
      total += ec.weight(j) * sum_j;
    }
    return total;
  }
  // One fused quadrature pass over every window of order < N.
  std::vector<MultiIndex> ks;
  std::vector<int> order_of;
  for (int j = 0; j < N; ++j)
    for (auto& k : multi_indices(d, j)) {
      ks.push_back(std::move(k));
      order_of.push_back(j);
    }
  const auto ips = window_inner_products(s, z, ks, quad);
  const double norm = std::pow(2 * pi_const * s.eps(), -d);
  double total = 0.0;
  for (size_t m = 0; m < ks.size(); ++m) total += ec.weight(order_of[m]) * norm * std::norm(ips[m]);
  return total;
}

/// The defining route mu^N = sum_{m<N} (-eps)^m/(4^m m!) Lap^m S^{g_0}_psi,
/// evaluated for Gaussian packets through the Laguerre expansion of iterated
/// Laplacians (the Husimi of g_w is itself a phase-space Gaussian of doubled
/// width, so the expansion applies with eps -> 2 eps). Serves as an
/// independent oracle for mu_density.
inline double mu_density_via_laplacians(const State& s, int N, const PhasePoint& z) {
  const auto* g = std::get_if<GaussianPacket>(&s.payload());
  if (!g) throw std::invalid_argument("mu_density_via_laplacians: Gaussian states only");
  if (N < 1) throw std::invalid_argument("mu_density_via_laplacians: N >= 1");
  const int d = s.dim();
  const double eps = s.eps();
  const PhasePoint u = z - g->center;
  // rho for the widened Gaussian: 2 |u_j|^2 / (2 eps).
  std::vector<double> rho(d);
  for (int j = 0; j < d; ++j) rho[j] = u.axis_squared_norm(j) / eps;
  const double hus = std::pow(2 * pi_const * eps, -d) * std::exp(-u.squared_norm() / (2 * eps));
  double total = 0.0;
  double inv_4m = 1.0;  // (1/4)^m
  double fact = 1.0;    // m!
  for (int m = 0; m < N; ++m) {
    if (m > 0) {
      inv_4m *= 0.25;
      fact *= m;
    }
    total += inv_4m / fact * laplace_laguerre(d, m).evaluate(rho);
  }
  return hus * total;
}

/// mu^N_psi as an explicit signed combination: per order j the weight
/// (-1)^j C_{N-1,j}, the multiplicity m_j, and a handle to the averaged
/// order-j spectrogram (a probability density).
struct SignedDensity {
  int order = 1;
  int dim = 1;
  double eps = 1.0;
  struct Component {
    int j = 0;
    double weight = 1.0;  // (-1)^j C_{N-1,j}
    Rational weight_exact;
    long multiplicity = 1;
    std::function<double(const PhasePoint&)> averaged_spectrogram;
  };
  std::vector<Component> components;

  static SignedDensity make(const State& s, int N, const QuadratureSpec& quad) {
    SignedDensity sd;
    sd.order = N;
    sd.dim = s.dim();
    sd.eps = s.eps();
    const auto ec = expansion_coefficients(s.dim(), N);
    for (int j = 0; j < N; ++j) {
      Component c;
      c.j = j;
      c.weight = ec.weight(j);
      c.weight_exact = (j % 2 ? -ec.c[j] : ec.c[j]);
      c.multiplicity = ec.mult(j);
      const auto ks = multi_indices(s.dim(), j);
      const double inv_m = 1.0 / static_cast<double>(c.multiplicity);
      c.averaged_spectrogram = [s, ks, quad, inv_m](const PhasePoint& z) {
        double sum = 0.0;
        for (const auto& k : ks) sum += spectrogram(s, k, z, quad);
        return std::max(0.0, inv_m * sum);
      };
      sd.components.push_back(std::move(c));
    }
    return sd;
  }

  double evaluate(const PhasePoint& z) const {
    double total = 0.0;
    for (const auto& c : components)
      total += c.weight * static_cast<double>(c.multiplicity) * c.averaged_spectrogram(z);
    return total;
  }
};

}  // namespace spectro
