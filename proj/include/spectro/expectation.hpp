#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spectro/observable.hpp"
#include "spectro/sampler.hpp"
#include "spectro/specfun.hpp"

namespace spectro {

namespace detail {

/// E[x^n] for x ~ N(mu, s2) via m_n = mu m_{n-1} + (n-1) s2 m_{n-2}.
template <class Real>
Real gaussian_moment(int n, Real mu, Real s2) {
  Real m_prev = 1, m = mu;
  if (n == 0) return m_prev;
  for (int k = 2; k <= n; ++k) {
    const Real m_next = mu * m + (k - 1) * s2 * m_prev;
    m_prev = m;
    m = m_next;
  }
  return m;
}

template <class Real>
struct KahanSum {
  Real sum = 0, comp = 0;
  void add(Real v) {
    const Real y = v - comp;
    const Real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

/// Least-squares slope of y against x.
inline double regression_slope(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace detail

/// Standard error of the mean of a correlated series by batch means.
inline double batch_means_stderr(std::span<const double> values, int n_batches = 50) {
  const long n = static_cast<long>(values.size());
  if (n < 2 * n_batches) n_batches = std::max(2, static_cast<int>(n / 2));
  const long b = n / n_batches;
  std::vector<double> means;
  means.reserve(n_batches);
  for (int i = 0; i < n_batches; ++i) {
    double s = 0.0;
    for (long l = i * b; l < (i + 1) * b; ++l) s += values[l];
    means.push_back(s / b);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= means.size();
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= (means.size() - 1);
  return std::sqrt(var / means.size());
}

struct OracleResult {
  long double value = 0;
  double tolerance = 0;  // 0 for the exact paths
  std::string method;
};

/// Exact <g_w, op(a) g_w> = E[a(Z)], Z ~ N(w, (eps/2) Id_{2d}):
/// polynomial observables through Gaussian moments, cos/sin of a single
/// variable through the characteristic function, anything else by high-order
/// Gauss-Hermite quadrature over the variables actually used.
inline OracleResult gaussian_weyl_oracle(const PhasePoint& w, const Observable& a, double eps) {
  const int d = a.dim();
  if (w.dim() != d) throw std::invalid_argument("gaussian_weyl_oracle: dim mismatch");
  const long double s2 = static_cast<long double>(eps) / 2;
  std::vector<long double> center(2 * d);
  for (int j = 0; j < d; ++j) {
    center[j] = w.q[j];
    center[d + j] = w.p[j];
  }

  if (auto poly = a.polynomial()) {
    detail::KahanSum<long double> acc;
    for (const auto& [mono, coef] : poly->terms) {
      if (coef == 0.0) continue;
      long double term = coef;
      for (int v = 0; v < 2 * d; ++v)
        if (mono[v] > 0) term *= detail::gaussian_moment<long double>(mono[v], center[v], s2);
      acc.add(term);
    }
    return {acc.sum, 0.0, "moments"};
  }

  const Expr& ast = a.ast();
  if ((ast.op == Expr::Op::cos || ast.op == Expr::Op::sin) &&
      ast.kids[0].op == Expr::Op::variable) {
    const long double mu = center[ast.kids[0].var];
    const long double damp = std::exp(-s2 / 2);
    const long double v = ast.op == Expr::Op::cos ? std::cos(mu) * damp : std::sin(mu) * damp;
    return {v, 0.0, "characteristic_function"};
  }

  // Quadrature fallback over the used variables.
  const auto used = a.used_vars();
  if (used.size() > 3)
    throw std::invalid_argument("gaussian_weyl_oracle: quadrature path limited to 3 active variables");
  const int per_axis = used.size() <= 1 ? 200 : (used.size() == 2 ? 200 : 100);
  auto integrate = [&](int n) {
    const auto& [t, wt] = detail::gauss_hermite_unit_cached<long double>(n);
    const long double scale = std::sqrt(2 * s2);
    std::vector<long double> vars(center);
    detail::KahanSum<long double> acc;
    std::vector<int> idx(used.size(), 0);
    long total = 1;
    for (size_t j = 0; j < used.size(); ++j) total *= n;
    const long double wnorm =
        std::pow(static_cast<long double>(pi_const), -0.5L * static_cast<long double>(used.size()));
    for (long i = 0; i < total; ++i) {
      long double wprod = wnorm;
      for (size_t j = 0; j < used.size(); ++j) {
        vars[used[j]] = center[used[j]] + scale * t[idx[j]];
        wprod *= wt[idx[j]];
      }
      acc.add(wprod * a.eval_vars<long double>(vars));
      for (int j = static_cast<int>(used.size()) - 1; j >= 0; --j) {
        if (++idx[j] < n) break;
        idx[j] = 0;
      }
    }
    return acc.sum;
  };
  const long double v1 = integrate(per_axis);
  const long double v0 = integrate(per_axis / 2);
  return {v1, static_cast<double>(std::abs(v1 - v0)), "gauss_hermite"};
}

/// Deterministic integral int a(z) mu^N_{g_w}(z) dz in extended precision:
/// with z = w + sqrt(2 eps) t the closed-form density reduces to
/// pi^{-d} e^{-|t|^2} M_N(t), M_N a polynomial in the per-axis radii
/// t_{q_j}^2 + t_{p_j}^2, integrated on a tensor Gauss-Hermite grid.
inline long double mu_expectation_deterministic(const PhasePoint& w, const Observable& a, int N,
                                                double eps, int nodes_per_axis = 0) {
  const int d = a.dim();
  if (w.dim() != d) throw std::invalid_argument("mu_expectation_deterministic: dim mismatch");
  if (N < 1 || N > 8) throw std::invalid_argument("mu_expectation_deterministic: need 1 <= N <= 8");
  if (d > 2) throw std::invalid_argument("mu_expectation_deterministic: tensor grid limited to d <= 2");
  const int n = nodes_per_axis > 0 ? nodes_per_axis : (d == 1 ? 200 : 60);

  const auto ec = expansion_coefficients(d, N);
  // Terms (coef, k) with coef = (-1)^j C_{N-1,j} / (k_1! ... k_d!).
  struct MuTerm {
    long double coef;
    MultiIndex k;
  };
  std::vector<MuTerm> terms;
  for (int j = 0; j < N; ++j) {
    const long double wj = (j % 2 ? -1.0L : 1.0L) * to_long_double(ec.c[j]);
    for (const auto& k : multi_indices(d, j)) {
      long double fact = 1;
      for (int i = 0; i < d; ++i)
        for (int m = 2; m <= k[i]; ++m) fact *= m;
      terms.push_back({wj / fact, k});
    }
  }

  const auto& [t, wt] = detail::gauss_hermite_unit_cached<long double>(n);
  const long double scale = std::sqrt(2 * static_cast<long double>(eps));
  const long double wnorm = std::pow(static_cast<long double>(pi_const), -static_cast<long double>(d));
  std::vector<long double> vars(2 * d);
  std::vector<long double> radii(d);
  std::vector<int> idx(2 * d, 0);
  long total = 1;
  for (int j = 0; j < 2 * d; ++j) total *= n;
  detail::KahanSum<long double> acc;
  for (long i = 0; i < total; ++i) {
    long double wprod = wnorm;
    for (int j = 0; j < d; ++j) {
      vars[j] = w.q[j] + scale * t[idx[j]];
      vars[d + j] = w.p[j] + scale * t[idx[d + j]];
      wprod *= wt[idx[j]] * wt[idx[d + j]];
      radii[j] = t[idx[j]] * t[idx[j]] + t[idx[d + j]] * t[idx[d + j]];
    }
    long double mu_poly = 0;
    for (const auto& term : terms) {
      long double v = term.coef;
      for (int j = 0; j < d; ++j)
        for (int m = 0; m < term.k[j]; ++m) v *= radii[j];
      mu_poly += v;
    }
    acc.add(wprod * mu_poly * a.eval_vars<long double>(vars));
    for (int j = 2 * d - 1; j >= 0; --j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
  }
  return acc.sum;
}

/// Signed-estimator output. estimate = sum_j (-1)^j C_{N-1,j} m_j mean_j.
struct ExpectationResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::vector<double> per_order_means;
  long n = 0;  // samples per order
  int order = 1;
  std::string method;
};

/// Monte Carlo estimator: per order j < N a Metropolis chain targeting the
/// averaged order-j spectrogram, combined with the signed weights. Per-order
/// standard errors come from batch means and combine in quadrature.
inline ExpectationResult estimate_expectation(const State& s, const Observable& a, int N,
                                              const ChainConfig& cfg) {
  if (N < 1) throw std::invalid_argument("estimate_expectation: N >= 1");
  if (a.dim() != s.dim()) throw std::invalid_argument("estimate_expectation: dim mismatch");
  const auto ec = expansion_coefficients(s.dim(), N);
  ExpectationResult res;
  res.order = N;
  res.n = cfg.n_samples;
  res.method = "mcmc";
  double est = 0.0, var = 0.0;
  for (int j = 0; j < N; ++j) {
    ChainConfig sub = cfg;
    sub.seed = detail::derive_stream(cfg.seed, 100 + j);
    const SampleSet set = metropolis_chain(s, j, sub);
    std::vector<double> vals(set.size());
    for (long i = 0; i < set.size(); ++i) vals[i] = a.eval(set.point(i));
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    const double se = batch_means_stderr(vals);
    const double wm = ec.weight(j) * static_cast<double>(ec.mult(j));
    res.per_order_means.push_back(mean);
    est += wm * mean;
    var += wm * wm * se * se;
  }
  res.estimate = est;
  res.std_error = std::sqrt(var);
  return res;
}

/// Deterministic-path counterpart for Gaussian packets (used by the
/// eps-convergence studies, where Monte Carlo noise would drown the signal).
inline ExpectationResult estimate_expectation_deterministic(const State& s, const Observable& a,
                                                            int N, int nodes_per_axis = 0) {
  const auto* g = std::get_if<GaussianPacket>(&s.payload());
  if (!g) throw std::invalid_argument("estimate_expectation_deterministic: Gaussian states only");
  ExpectationResult res;
  res.order = N;
  res.method = "deterministic";
  res.estimate =
      static_cast<double>(mu_expectation_deterministic(g->center, a, N, s.eps(), nodes_per_axis));
  return res;
}

struct ConvergenceRow {
  double eps = 0;
  int order = 1;
  std::string observable;
  double error = 0;
  double slope_fit = 0;  // per (observable, order) series
};

/// Error table |int a mu^N - oracle| over an eps grid, deterministic path,
/// with fitted log-log slopes per (observable, N) series.
inline std::vector<ConvergenceRow> convergence_experiment(const PhasePoint& w,
                                                          const std::vector<Observable>& observables,
                                                          const std::vector<int>& orders,
                                                          const std::vector<double>& eps_grid,
                                                          int nodes_per_axis = 0) {
  std::vector<ConvergenceRow> rows;
  for (const auto& a : observables) {
    for (int N : orders) {
      std::vector<double> lx, ly;
      const size_t first = rows.size();
      for (double eps : eps_grid) {
        const OracleResult oracle = gaussian_weyl_oracle(w, a, eps);
        const long double est = mu_expectation_deterministic(w, a, N, eps, nodes_per_axis);
        const double err = static_cast<double>(std::abs(est - oracle.value));
        rows.push_back({eps, N, a.source(), err, 0.0});
        if (err > 0) {
          lx.push_back(std::log10(eps));
          ly.push_back(std::log10(err));
        }
      }
      const double slope = lx.size() >= 2
                               ? detail::regression_slope(lx, ly)
                               : std::numeric_limits<double>::quiet_NaN();
      for (size_t i = first; i < rows.size(); ++i) rows[i].slope_fit = slope;
    }
  }
  return rows;
}

/// Rectangular phase-space grid for d = 1 histograms.
struct HistogramGrid {
  double qmin = -1, qmax = 1, pmin = -1, pmax = 1;
  int nq = 32, np = 32;

  double bin_area() const { return (qmax - qmin) / nq * ((pmax - pmin) / np); }
  double q_center(int iq) const { return qmin + (iq + 0.5) * (qmax - qmin) / nq; }
  double p_center(int ip) const { return pmin + (ip + 0.5) * (pmax - pmin) / np; }

  /// Default experiment box: center +- 6 sqrt(eps), bins sqrt(eps)/4 wide.
  static HistogramGrid centered(const PhasePoint& c, double eps) {
    const double rt = std::sqrt(eps);
    HistogramGrid g;
    g.qmin = c.q[0] - 6 * rt;
    g.qmax = c.q[0] + 6 * rt;
    g.pmin = c.p[0] - 6 * rt;
    g.pmax = c.p[0] + 6 * rt;
    g.nq = g.np = 48;  // 12 sqrt(eps) span / (sqrt(eps)/4) bins
    return g;
  }
};

struct SignedGrid {
  HistogramGrid grid;
  std::vector<double> values;  // nq x np row-major over q

  double& at(int iq, int ip) { return values[static_cast<size_t>(iq) * grid.np + ip]; }
  double at(int iq, int ip) const { return values[static_cast<size_t>(iq) * grid.np + ip]; }
  double mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.bin_area();
  }
  double min_value() const {
    double m = 0.0;
    for (double v : values) m = std::min(m, v);
    return m;
  }
};

/// Signed histogram estimate of mu^N from per-order sample sets (orders
/// 0..N-1, equal sample counts): bins combine as
///   (1/n) sum_j (-1)^j C_{N-1,j} m_j count_j(bin) / bin_area.
inline SignedGrid weighted_histogram(const std::vector<SampleSet>& samples, int N,
                                     const HistogramGrid& grid) {
  if (static_cast<int>(samples.size()) != N)
    throw std::invalid_argument("weighted_histogram: need one sample set per order 0..N-1");
  const long n = samples.front().size();
  for (const auto& s : samples) {
    if (s.dim != 1) throw std::invalid_argument("weighted_histogram: d = 1 only");
    if (s.size() != n) throw std::invalid_argument("weighted_histogram: unequal sample counts");
  }
  const auto ec = expansion_coefficients(1, N);
  SignedGrid out;
  out.grid = grid;
  out.values.assign(static_cast<size_t>(grid.nq) * grid.np, 0.0);
  const double dq = (grid.qmax - grid.qmin) / grid.nq;
  const double dp = (grid.pmax - grid.pmin) / grid.np;
  for (int j = 0; j < N; ++j) {
    const double w = ec.weight(j) * static_cast<double>(ec.mult(j)) / (n * grid.bin_area());
    const auto& pts = samples[j].points;
    for (long i = 0; i < n; ++i) {
      const double q = pts[2 * i], p = pts[2 * i + 1];
      const int iq = static_cast<int>(std::floor((q - grid.qmin) / dq));
      const int ip = static_cast<int>(std::floor((p - grid.pmin) / dp));
      if (iq < 0 || iq >= grid.nq || ip < 0 || ip >= grid.np) continue;
      out.at(iq, ip) += w;
    }
  }
  return out;
}

}  // namespace spectro
