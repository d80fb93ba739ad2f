#pragma once

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "spectro/multi_index.hpp"
#include "spectro/phase_point.hpp"
#include "spectro/quadrature.hpp"
#include "spectro/specfun.hpp"

namespace spectro {

class State;

struct GaussianPacket {
  PhasePoint center;
};

struct HermiteState {
  MultiIndex k;
};

/// d = 1 only: psi(x) = sqrt(3/(2 sqrt(eps))) (1 - |x-q|/sqrt(eps)) on |x-q| < sqrt(eps).
struct HatState {
  double center_q = 0.0;
};

struct Superposition {
  std::vector<std::complex<double>> coeffs;
  std::vector<State> parts;
  double inv_norm = 1.0;  // normalizing constant applied on evaluation
};

/// Immutable wavefunction descriptor with pointwise evaluation. All states
/// carry the semiclassical scale eps; mixing scales is a constructor error.
class State {
 public:
  using Payload = std::variant<GaussianPacket, HermiteState, HatState, Superposition>;

  static State gaussian(double eps, PhasePoint center) {
    const int d = center.dim();
    return State(d, eps, GaussianPacket{std::move(center)});
  }
  static State hermite(double eps, MultiIndex k) {
    const int d = k.dim();
    return State(d, eps, HermiteState{std::move(k)});
  }
  static State hat(double eps, double center_q) { return State(1, eps, HatState{center_q}); }

  /// Builds the normalized superposition sum_i c_i psi_i / ||sum c_i psi_i||.
  /// The normalization integral is evaluated once here and cached.
  static State superposition(std::vector<std::pair<std::complex<double>, State>> terms,
                             int quad_nodes = 80);

  int dim() const { return dim_; }
  double eps() const { return eps_; }
  const Payload& payload() const { return *payload_; }

  bool is_gaussian() const { return std::holds_alternative<GaussianPacket>(*payload_); }
  bool is_hermite() const { return std::holds_alternative<HermiteState>(*payload_); }
  bool is_hat() const { return std::holds_alternative<HatState>(*payload_); }
  bool is_superposition() const { return std::holds_alternative<Superposition>(*payload_); }

  std::complex<double> evaluate(std::span<const double> x) const;

  /// Nominal phase-space center: Gaussian center, origin for Hermite states,
  /// (q, 0) for the hat, |c|^2-weighted mean for superpositions.
  PhasePoint phase_center() const;

 private:
  State(int d, double eps, Payload p)
      : dim_(d), eps_(eps), payload_(std::make_shared<const Payload>(std::move(p))) {
    if (eps_ <= 0) throw std::invalid_argument("State: eps must be positive");
    if (dim_ < 1) throw std::invalid_argument("State: dim must be >= 1");
  }

  int dim_ = 1;
  double eps_ = 1.0;
  std::shared_ptr<const Payload> payload_;
};

/// (T_z phi_k)(x) = e^{i p.(x - q/2)/eps} phi_k(x - q).
inline std::complex<double> heisenberg_weyl_shift(const PhasePoint& z, const MultiIndex& k,
                                                  double eps, std::span<const double> x) {
  const int d = k.dim();
  if (z.dim() != d || static_cast<int>(x.size()) != d)
    throw std::invalid_argument("heisenberg_weyl_shift: dimension mismatch");
  double phase = 0.0;
  std::vector<double> shifted(d);
  for (int j = 0; j < d; ++j) {
    phase += z.p[j] * (x[j] - 0.5 * z.q[j]);
    shifted[j] = x[j] - z.q[j];
  }
  phase /= eps;
  return std::polar(1.0, phase) * hermite_function(k, eps, shifted);
}

namespace detail {

/// Gauss-Legendre rule on [-1,1] (Golub-Welsch on the Legendre Jacobi matrix).
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_unit(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    using Mat = Eigen::MatrixXd;
    Mat J = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double b = i / std::sqrt(4.0 * i * i - 1.0);
      J(i, i - 1) = b;
      J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    std::vector<double> t(n), w(n);
    for (int i = 0; i < n; ++i) {
      t[i] = es.eigenvalues()(i);
      const double v0 = es.eigenvectors()(0, i);
      w[i] = 2.0 * v0 * v0;
    }
    it = cache.emplace(n, std::make_pair(std::move(t), std::move(w))).first;
  }
  return it->second;
}

/// Integrates f over [a,b] split at the given breakpoints, 32-point
/// Gauss-Legendre per smooth piece.
template <class F>
auto piecewise_gl(F&& f, double a, double b, std::vector<double> breaks) -> decltype(f(0.0)) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  const auto& [t, w] = gauss_legendre_unit(32);
  decltype(f(0.0)) total{};
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (size_t l = 0; l < t.size(); ++l) total += half * w[l] * f(mid + half * t[l]);
  }
  return total;
}

struct AxisFactor {
  enum class Kind { gaussian, hermite, hat } kind;
  double q = 0.0, p = 0.0;  // gaussian
  int n = 0;                // hermite order
  double hat_q = 0.0;       // hat center
};

/// One non-superposition state as per-axis factors (all base states factorize).
inline std::vector<AxisFactor> axis_factors(const State& s) {
  std::vector<AxisFactor> out;
  const auto& pl = s.payload();
  if (const auto* g = std::get_if<GaussianPacket>(&pl)) {
    for (int j = 0; j < s.dim(); ++j)
      out.push_back({AxisFactor::Kind::gaussian, g->center.q[j], g->center.p[j], 0, 0.0});
  } else if (const auto* h = std::get_if<HermiteState>(&pl)) {
    for (int j = 0; j < s.dim(); ++j) out.push_back({AxisFactor::Kind::hermite, 0, 0, h->k[j], 0.0});
  } else if (const auto* t = std::get_if<HatState>(&pl)) {
    out.push_back({AxisFactor::Kind::hat, 0, 0, 0, t->center_q});
  } else {
    throw std::logic_error("axis_factors: superposition is not a base state");
  }
  return out;
}

inline std::complex<double> eval_axis_factor(const AxisFactor& f, double eps, double x) {
  switch (f.kind) {
    case AxisFactor::Kind::gaussian: {
      const double u = x - f.q;
      const double amp = std::pow(3.14159265358979323846 * eps, -0.25) * std::exp(-u * u / (2 * eps));
      return std::polar(amp, f.p * (x - 0.5 * f.q) / eps);
    }
    case AxisFactor::Kind::hermite: {
      std::vector<double> buf(f.n + 1);
      hermite_unit_values<double>(f.n, x / std::sqrt(eps), buf);
      return buf[f.n] / std::sqrt(std::sqrt(eps));
    }
    case AxisFactor::Kind::hat: {
      const double rt = std::sqrt(eps);
      const double u = std::abs(x - f.hat_q);
      if (u >= rt) return 0.0;
      return std::sqrt(1.5 / rt) * (1.0 - u / rt);
    }
  }
  return 0.0;
}

/// <f, g> = int f conj(g) dx along one axis. Gaussian-type pairs use a
/// midpoint-centered Gauss-Hermite rule whose weight absorbs the product's
/// Gaussian factor exactly; hat pairs integrate over the compact support with
/// Gauss-Legendre split at the kinks.
inline std::complex<double> inner_1d(const AxisFactor& f, const AxisFactor& g, double eps,
                                     int gh_nodes) {
  const double rt = std::sqrt(eps);
  const bool f_hat = f.kind == AxisFactor::Kind::hat, g_hat = g.kind == AxisFactor::Kind::hat;
  if (f_hat || g_hat) {
    double lo = -8 * rt, hi = 8 * rt;
    std::vector<double> breaks;
    if (f_hat) {
      lo = f.hat_q - rt;
      hi = f.hat_q + rt;
      breaks = {f.hat_q - rt, f.hat_q, f.hat_q + rt};
    }
    if (g_hat) {
      const double glo = g.hat_q - rt, ghi = g.hat_q + rt;
      breaks.insert(breaks.end(), {glo, g.hat_q, ghi});
      if (f_hat) {
        lo = std::max(lo, glo);
        hi = std::min(hi, ghi);
      } else {
        lo = glo;
        hi = ghi;
      }
    }
    if (hi <= lo) return 0.0;
    return piecewise_gl(
        [&](double x) { return eval_axis_factor(f, eps, x) * std::conj(eval_axis_factor(g, eps, x)); },
        lo, hi, std::move(breaks));
  }
  const double cf = (f.kind == AxisFactor::Kind::gaussian) ? f.q : 0.0;
  const double cg = (g.kind == AxisFactor::Kind::gaussian) ? g.q : 0.0;
  const double mid = 0.5 * (cf + cg);
  const auto& [t, w] = gauss_hermite_unit_cached<double>(gh_nodes);
  std::complex<double> acc = 0.0;
  for (size_t l = 0; l < t.size(); ++l) {
    const double x = mid + rt * t[l];
    // Divide out the absorbed weight e^{-(x-mid)^2/eps}.
    const double corr = std::exp(t[l] * t[l]);
    acc += rt * w[l] * corr * eval_axis_factor(f, eps, x) * std::conj(eval_axis_factor(g, eps, x));
  }
  return acc;
}

struct FlatTerm {
  std::complex<double> coeff;
  const State* base;
};

inline void flatten(const State& s, std::complex<double> c, std::vector<FlatTerm>& out) {
  if (const auto* sp = std::get_if<Superposition>(&s.payload())) {
    for (size_t i = 0; i < sp->parts.size(); ++i)
      flatten(sp->parts[i], c * sp->coeffs[i] * sp->inv_norm, out);
  } else {
    out.push_back({c, &s});
  }
}

/// <s1, s2> over R^d as a product of per-axis 1D integrals, summed over
/// flattened superposition terms.
inline std::complex<double> state_inner_product(const State& a, const State& b, int gh_nodes) {
  if (a.dim() != b.dim()) throw std::invalid_argument("state_inner_product: dim mismatch");
  if (a.eps() != b.eps()) throw std::invalid_argument("state_inner_product: eps mismatch");
  std::vector<FlatTerm> ta, tb;
  flatten(a, 1.0, ta);
  flatten(b, 1.0, tb);
  std::complex<double> total = 0.0;
  for (const auto& fa : ta) {
    const auto axa = axis_factors(*fa.base);
    for (const auto& fb : tb) {
      const auto axb = axis_factors(*fb.base);
      std::complex<double> prod = fa.coeff * std::conj(fb.coeff);
      for (int j = 0; j < a.dim() && prod != 0.0; ++j)
        prod *= inner_1d(axa[j], axb[j], a.eps(), gh_nodes);
      total += prod;
    }
  }
  return total;
}

}  // namespace detail

inline std::complex<double> State::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("State::evaluate: dim mismatch");
  const auto& pl = *payload_;
  if (const auto* sp = std::get_if<Superposition>(&pl)) {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < sp->parts.size(); ++i) acc += sp->coeffs[i] * sp->parts[i].evaluate(x);
    return acc * sp->inv_norm;
  }
  const auto factors = detail::axis_factors(*this);
  std::complex<double> v = 1.0;
  for (int j = 0; j < dim_; ++j) v *= detail::eval_axis_factor(factors[j], eps_, x[j]);
  return v;
}

inline PhasePoint State::phase_center() const {
  const auto& pl = *payload_;
  if (const auto* g = std::get_if<GaussianPacket>(&pl)) return g->center;
  if (std::holds_alternative<HermiteState>(pl)) return PhasePoint::zero(dim_);
  if (const auto* h = std::get_if<HatState>(&pl)) return PhasePoint(h->center_q, 0.0);
  const auto& sp = std::get<Superposition>(pl);
  PhasePoint c = PhasePoint::zero(dim_);
  double wsum = 0.0;
  for (size_t i = 0; i < sp.parts.size(); ++i) {
    const double w = std::norm(sp.coeffs[i]);
    const PhasePoint pc = sp.parts[i].phase_center();
    for (int j = 0; j < dim_; ++j) {
      c.q[j] += w * pc.q[j];
      c.p[j] += w * pc.p[j];
    }
    wsum += w;
  }
  if (wsum > 0)
    for (int j = 0; j < dim_; ++j) {
      c.q[j] /= wsum;
      c.p[j] /= wsum;
    }
  return c;
}

inline State State::superposition(std::vector<std::pair<std::complex<double>, State>> terms,
                                  int quad_nodes) {
  if (terms.empty()) throw std::invalid_argument("superposition: no terms");
  const int d = terms.front().second.dim();
  const double eps = terms.front().second.eps();
  Superposition sp;
  for (auto& [c, st] : terms) {
    if (st.dim() != d) throw std::invalid_argument("superposition: terms have mixed dimension");
    if (st.eps() != eps) throw std::invalid_argument("superposition: terms have mixed eps");
    sp.coeffs.push_back(c);
    sp.parts.push_back(std::move(st));
  }
  State probe(d, eps, Payload(sp));  // inv_norm = 1
  const double nrm = std::sqrt(std::abs(detail::state_inner_product(probe, probe, quad_nodes)));
  if (!(nrm > 0)) throw std::invalid_argument("superposition: zero norm");
  sp.inv_norm = 1.0 / nrm;
  return State(d, eps, std::move(sp));
}

/// ||psi||_{L^2} by quadrature. The nodes field of the spec controls the
/// per-axis resolution of the deterministic rule.
inline double norm(const State& s, const QuadratureSpec& quad) {
  const int n = std::max(16, std::min(quad.nodes, 200));
  return std::sqrt(std::abs(detail::state_inner_product(s, s, n)));
}

}  // namespace spectro
