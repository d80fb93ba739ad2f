#pragma once

#include <cstdint>
#include <cstring>
#include <future>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spectro/densities.hpp"

namespace spectro {

/// Configuration of one Metropolis-Hastings run. The proposal is
/// z' = z + sqrt(eps) * proposal_scale * zeta with zeta ~ N(0, Id_{2d}).
struct ChainConfig {
  long n_samples = 10000;
  long burn_in = 1000;
  std::uint64_t seed = 0;
  double proposal_scale = 1.0;
  QuadratureSpec quad;
  std::optional<PhasePoint> initial;  // nullopt: auto-seed from the state's center
  int n_chains = 1;

  ChainConfig() = default;
};

/// Immutable MCMC output: points are stored row-major as (q_1..q_d, p_1..p_d).
struct SampleSet {
  int order_j = 0;
  int dim = 1;
  std::vector<double> points;
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t target_hash = 0;

  long size() const { return static_cast<long>(points.size()) / (2 * dim); }
  PhasePoint point(long i) const {
    PhasePoint z = PhasePoint::zero(dim);
    for (int j = 0; j < dim; ++j) {
      z.q[j] = points[i * 2 * dim + j];
      z.p[j] = points[i * 2 * dim + dim + j];
    }
    return z;
  }
};

/// Symmetric-proposal Metropolis rule, written as u * t_old < t_new so that a
/// zero-density current point never traps the chain.
inline bool mh_accept(double t_new, double t_old, double u) { return u * t_old < t_new; }

namespace detail {

/// Averaged spectrogram of one order with the multi-index set and closed-form
/// dispatch resolved once; evaluation cost is then a single fused quadrature.
class OrderTarget {
 public:
  OrderTarget(const State& s, int j, const QuadratureSpec& quad)
      : state_(s), quad_(quad), ks_(multi_indices(s.dim(), j)) {
    inv_mult_ = 1.0 / static_cast<double>(ks_.size());
    closed_ = true;
    for (const auto& k : ks_) closed_ = closed_ && detail::has_spectrogram_closed_form(s, k);
    norm_ = std::pow(2 * pi_const * s.eps(), -s.dim());
  }

  double operator()(const PhasePoint& z, std::uint64_t call_index) const {
    double sum = 0.0;
    if (closed_) {
      for (const auto& k : ks_) sum += *detail::spectrogram_closed_form(state_, k, z);
    } else {
      const auto ips = window_inner_products(state_, z, ks_, quad_.with_call_index(call_index));
      for (const auto& ip : ips) sum += norm_ * std::norm(ip);
    }
    return std::max(0.0, inv_mult_ * sum);
  }

 private:
  State state_;
  QuadratureSpec quad_;
  std::vector<MultiIndex> ks_;
  bool closed_ = false;
  double inv_mult_ = 1.0;
  double norm_ = 1.0;
};

inline std::uint64_t target_hash(const State& s, int j, const QuadratureSpec& quad) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mixin = [&h](std::uint64_t v) { h = mix64(h ^ mix64(v)); };
  mixin(static_cast<std::uint64_t>(j));
  mixin(static_cast<std::uint64_t>(s.dim()));
  std::uint64_t bits;
  double e = s.eps();
  std::memcpy(&bits, &e, 8);
  mixin(bits);
  mixin(static_cast<std::uint64_t>(s.payload().index()));
  mixin(static_cast<std::uint64_t>(quad.kind));
  mixin(static_cast<std::uint64_t>(quad.nodes));
  return h;
}

}  // namespace detail

/// m_j^{-1} sum_{|k|=j} S^{phi_k}_psi(z): the order-j averaged Hermite
/// spectrogram, a probability density.
inline double target_density(const State& s, int j, const PhasePoint& z, const QuadratureSpec& quad) {
  if (j < 0) throw std::invalid_argument("target_density: j >= 0");
  return detail::OrderTarget(s, j, quad)(z, quad.call_index);
}

/// Phase-space seed with positive target density: the state's nominal center,
/// then sqrt(eps)-scale normal perturbations of it, first hit wins.
inline PhasePoint auto_seed(const State& s, int j, const QuadratureSpec& quad,
                            std::uint64_t seed = 0) {
  const detail::OrderTarget target(s, j, quad);
  const PhasePoint center = s.phase_center();
  const double rt = std::sqrt(s.eps());
  detail::Rng rng(detail::derive_stream(seed, 0x5eedull));
  PhasePoint z = center;
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (attempt > 0)
      for (int i = 0; i < s.dim(); ++i) {
        z.q[i] = center.q[i] + rt * rng.normal();
        z.p[i] = center.p[i] + rt * rng.normal();
      }
    if (target(z, 0) > 0.0) return z;
  }
  throw std::runtime_error("auto_seed: no point of positive density found in 100 attempts");
}

namespace detail {

inline SampleSet run_single_chain(const State& s, int j, const ChainConfig& cfg,
                                  std::uint64_t chain_seed) {
  const int d = s.dim();
  QuadratureSpec quad = cfg.quad;
  quad.rng_seed = derive_stream(cfg.quad.rng_seed, chain_seed);
  const OrderTarget target(s, j, quad);
  const double step = std::sqrt(s.eps()) * cfg.proposal_scale;

  Rng rng(chain_seed);
  PhasePoint z = cfg.initial ? *cfg.initial : auto_seed(s, j, quad, chain_seed);
  if (z.dim() != d) throw std::invalid_argument("metropolis_chain: initial point dim mismatch");

  SampleSet out;
  out.order_j = j;
  out.dim = d;
  out.seed = chain_seed;
  out.target_hash = target_hash(s, j, quad);
  out.points.reserve(cfg.n_samples * 2 * d);

  double t_cur = target(z, 0);
  PhasePoint zp = z;
  long accepted = 0;
  const long total = cfg.burn_in + cfg.n_samples;
  for (long step_i = 0; step_i < total; ++step_i) {
    for (int i = 0; i < d; ++i) {
      zp.q[i] = z.q[i] + step * rng.normal();
      zp.p[i] = z.p[i] + step * rng.normal();
    }
    const double t_new = target(zp, static_cast<std::uint64_t>(step_i) + 1);
    if (mh_accept(t_new, t_cur, rng.uniform01())) {
      z = zp;
      t_cur = t_new;
      if (step_i >= cfg.burn_in) ++accepted;
    }
    if (step_i >= cfg.burn_in) {
      out.points.insert(out.points.end(), z.q.begin(), z.q.end());
      out.points.insert(out.points.end(), z.p.begin(), z.p.end());
    }
  }
  out.acceptance_rate = cfg.n_samples > 0 ? static_cast<double>(accepted) / cfg.n_samples : 0.0;
  return out;
}

}  // namespace detail

/// Metropolis-Hastings chain targeting the order-j averaged spectrogram.
/// Deterministic given (state, j, cfg); with n_chains > 1 the run splits into
/// independent chains (seeds derived from cfg.seed) that are concatenated
/// after their individual burn-ins.
inline SampleSet metropolis_chain(const State& s, int j, const ChainConfig& cfg) {
  if (cfg.n_samples < 1 || cfg.burn_in < 0 || !(cfg.proposal_scale > 0))
    throw std::invalid_argument("metropolis_chain: bad chain config");
  const int nc = std::max(1, cfg.n_chains);
  if (nc == 1) return detail::run_single_chain(s, j, cfg, detail::derive_stream(cfg.seed, 1));

  std::vector<std::future<SampleSet>> futs;
  for (int c = 0; c < nc; ++c) {
    ChainConfig sub = cfg;
    sub.n_chains = 1;
    sub.n_samples = cfg.n_samples / nc + (c < cfg.n_samples % nc ? 1 : 0);
    if (sub.n_samples == 0) continue;
    futs.push_back(std::async(std::launch::async, [=, &s]() {
      return detail::run_single_chain(s, j, sub, detail::derive_stream(cfg.seed, 1 + c));
    }));
  }
  SampleSet all;
  all.order_j = j;
  all.dim = s.dim();
  all.seed = cfg.seed;
  double acc = 0.0;
  long n_total = 0;
  for (auto& f : futs) {
    SampleSet part = f.get();
    all.target_hash = part.target_hash;
    all.points.insert(all.points.end(), part.points.begin(), part.points.end());
    acc += part.acceptance_rate * part.size();
    n_total += part.size();
  }
  all.acceptance_rate = n_total > 0 ? acc / n_total : 0.0;
  return all;
}

}  // namespace spectro
