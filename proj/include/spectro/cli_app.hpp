#pragma once

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectro/expectation.hpp"
#include "spectro/io.hpp"
#include "spectro/threading.hpp"

namespace spectro::cli {

namespace detail_cli {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
}

struct Common {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;
};

inline Json base_meta(const Common& c, const Json& config, std::uint64_t seed) {
  return Json{{"seed", seed},
              {"config_hash", spectro::detail::hex64(spectro::detail::fnv1a64(config.dump()))},
              {"out", c.out_path}};
}

inline std::uint64_t master_seed(const Common& c, const Json& config) {
  if (c.seed_override) return *c.seed_override;
  if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
  return 0;
}

struct GridSpec {
  double qmin, qmax, pmin, pmax;
  int nq, np;
};

inline GridSpec grid_from_json(const Json& j) {
  spectro::detail::check_keys(j, {"q", "p"}, "grid");
  auto q = spectro::detail::require<std::vector<double>>(j, "q", "grid");
  auto p = spectro::detail::require<std::vector<double>>(j, "p", "grid");
  if (q.size() != 3 || p.size() != 3) throw ConfigError("grid: q and p must be [min, max, count]");
  GridSpec g{q[0], q[1], p[0], p[1], static_cast<int>(q[2]), static_cast<int>(p[2])};
  if (g.nq < 1 || g.np < 1 || g.qmax <= g.qmin || g.pmax <= g.pmin)
    throw ConfigError("grid: empty ranges");
  if (static_cast<long>(g.nq) * g.np > 10'000'000) throw ConfigError("grid: more than 1e7 cells");
  return g;
}

inline GridSpec grid_from_flag(const std::string& s) {
  // "qmin:qmax:nq,pmin:pmax:np"
  GridSpec g{};
  if (std::sscanf(s.c_str(), "%lf:%lf:%d,%lf:%lf:%d", &g.qmin, &g.qmax, &g.nq, &g.pmin, &g.pmax,
                  &g.np) != 6)
    throw ConfigError("--grid expects qmin:qmax:nq,pmin:pmax:np");
  if (static_cast<long>(g.nq) * g.np > 10'000'000) throw ConfigError("grid: more than 1e7 cells");
  return g;
}

}  // namespace detail_cli

inline int cmd_coeffs(int dim, int order) {
  const auto ec = expansion_coefficients(dim, order);
  Json weights = Json::array();
  for (int j = 0; j < order; ++j) {
    std::ostringstream mag;
    mag << ec.c[j];
    weights.push_back(Json::array({mag.str(), j % 2 ? -1 : 1}));
  }
  Json out{{"dim", dim},
           {"order", order},
           {"weights", weights},
           {"multiplicities", ec.multiplicity},
           {"version", version_string}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

inline int cmd_density(const detail_cli::Common& c, const std::string& grid_flag) {
  const Json cfg = detail_cli::load_config(c.config_path);
  spectro::detail::check_keys(cfg, {"eps", "state", "which", "N", "k", "quad", "grid", "seed"},
                              "density config");
  const double eps = spectro::detail::require<double>(cfg, "eps", "density config");
  const State s = state_from_json(cfg.at("state"), eps);
  if (s.dim() != 1) throw ConfigError("density: grid evaluation is d = 1 only");
  const std::string which = spectro::detail::require<std::string>(cfg, "which", "density config");
  const std::uint64_t seed = detail_cli::master_seed(c, cfg);
  QuadratureSpec quad = cfg.contains("quad") ? quadrature_from_json(cfg.at("quad"))
                                             : default_quadrature(s, seed);
  detail_cli::GridSpec grid = grid_flag.empty() ? detail_cli::grid_from_json(cfg.at("grid"))
                                                : detail_cli::grid_from_flag(grid_flag);

  int N = 0;
  MultiIndex k = MultiIndex::zero(1);
  std::function<double(const PhasePoint&)> f;
  if (which == "wigner") {
    f = [&](const PhasePoint& z) { return wigner_numerical(s, z, quad); };
  } else if (which == "husimi") {
    f = [&](const PhasePoint& z) { return husimi(s, z, quad); };
  } else if (which == "spectrogram") {
    k = MultiIndex(spectro::detail::require<std::vector<int>>(cfg, "k", "density config"));
    f = [&](const PhasePoint& z) { return spectrogram(s, k, z, quad); };
  } else if (which == "mu") {
    N = spectro::detail::require<int>(cfg, "N", "density config");
    f = [&](const PhasePoint& z) { return mu_density(s, N, z, quad); };
  } else {
    throw ConfigError("density: which must be wigner|husimi|spectrogram|mu");
  }

  std::vector<double> values(static_cast<size_t>(grid.nq) * grid.np);
  parallel_for(
      grid.nq,
      [&](long iq) {
        const double q = grid.qmin + (iq + 0.5) * (grid.qmax - grid.qmin) / grid.nq;
        for (int ip = 0; ip < grid.np; ++ip) {
          const double p = grid.pmin + (ip + 0.5) * (grid.pmax - grid.pmin) / grid.np;
          values[iq * grid.np + ip] = f(PhasePoint(q, p));
        }
      },
      c.threads);

  Json meta = detail_cli::base_meta(c, cfg, seed);
  meta["state_hash"] = state_hash(s);
  meta["eps"] = eps;
  meta["which"] = which;
  if (which == "mu") meta["N"] = N;
  std::ostringstream os;
  os << csv_metadata(meta) << "q,p,value\n";
  for (int iq = 0; iq < grid.nq; ++iq)
    for (int ip = 0; ip < grid.np; ++ip) {
      const double q = grid.qmin + (iq + 0.5) * (grid.qmax - grid.qmin) / grid.nq;
      const double p = grid.pmin + (ip + 0.5) * (grid.pmax - grid.pmin) / grid.np;
      os << detail_cli::fmt(q) << "," << detail_cli::fmt(p) << ","
         << detail_cli::fmt(values[static_cast<size_t>(iq) * grid.np + ip]) << "\n";
    }
  atomic_write_file(c.out_path.empty() ? "density.csv" : c.out_path, os.str());
  return 0;
}

inline int cmd_sample(const detail_cli::Common& c) {
  const Json cfg = detail_cli::load_config(c.config_path);
  spectro::detail::check_keys(cfg, {"eps", "state", "orders", "N", "chain", "seed"}, "sample config");
  const double eps = spectro::detail::require<double>(cfg, "eps", "sample config");
  const State s = state_from_json(cfg.at("state"), eps);
  std::vector<int> orders;
  if (cfg.contains("orders"))
    orders = cfg.at("orders").get<std::vector<int>>();
  else
    for (int j = 0; j < spectro::detail::require<int>(cfg, "N", "sample config"); ++j)
      orders.push_back(j);
  ChainConfig chain = chain_from_json(cfg.at("chain"));
  const std::uint64_t seed = detail_cli::master_seed(c, cfg);
  const std::string prefix = c.out_path.empty() ? "samples" : c.out_path;

  // Compute everything first; write only afterwards so failures leave nothing.
  std::vector<SampleSet> sets(orders.size());
  parallel_for(
      static_cast<long>(orders.size()),
      [&](long i) {
        ChainConfig sub = chain;
        sub.seed = spectro::detail::derive_stream(seed, 7000 + orders[i]);
        sets[i] = metropolis_chain(s, orders[i], sub);
      },
      c.threads);

  for (size_t i = 0; i < orders.size(); ++i) {
    const auto& set = sets[i];
    Json meta = detail_cli::base_meta(c, cfg, seed);
    meta["state_hash"] = state_hash(s);
    meta["j"] = set.order_j;
    std::ostringstream os;
    os << csv_metadata(meta);
    const int d = set.dim;
    for (int j = 1; j <= d; ++j) os << "q_" << j << (j < d ? "," : "");
    for (int j = 1; j <= d; ++j) os << ",p_" << j;
    os << "\n";
    for (long m = 0; m < set.size(); ++m) {
      for (int j = 0; j < 2 * d; ++j)
        os << (j ? "," : "") << detail_cli::fmt(set.points[m * 2 * d + j]);
      os << "\n";
    }
    const std::string base = prefix + "_j" + std::to_string(set.order_j);
    atomic_write_file(base + ".csv", os.str());
    Json side{{"acceptance_rate", set.acceptance_rate},
              {"seed", seed},
              {"j", set.order_j},
              {"n", set.size()},
              {"burn_in", chain.burn_in},
              {"target_hash", spectro::detail::hex64(set.target_hash)},
              {"version", version_string}};
    atomic_write_file(base + ".json", side.dump(2) + "\n");
  }
  return 0;
}

inline int cmd_expect(const detail_cli::Common& c) {
  const Json cfg = detail_cli::load_config(c.config_path);
  spectro::detail::check_keys(cfg, {"eps", "state", "observable", "N", "chain", "method", "seed"},
                              "expect config");
  const double eps = spectro::detail::require<double>(cfg, "eps", "expect config");
  const State s = state_from_json(cfg.at("state"), eps);
  const int N = spectro::detail::require<int>(cfg, "N", "expect config");
  const Observable a =
      Observable::parse(spectro::detail::require<std::string>(cfg, "observable", "expect config"),
                        s.dim());
  const std::uint64_t seed = detail_cli::master_seed(c, cfg);
  const std::string method = cfg.value("method", std::string("mcmc"));

  ExpectationResult res;
  if (method == "deterministic") {
    res = estimate_expectation_deterministic(s, a, N);
  } else if (method == "mcmc") {
    ChainConfig chain = cfg.contains("chain") ? chain_from_json(cfg.at("chain")) : ChainConfig{};
    if (!cfg.contains("chain") || !cfg.at("chain").contains("quad"))
      chain.quad = default_quadrature(s, seed);
    chain.seed = spectro::detail::derive_stream(seed, 11);
    res = estimate_expectation(s, a, N, chain);
  } else {
    throw ConfigError("expect: method must be mcmc|deterministic");
  }

  Json out{{"estimate", res.estimate},
           {"std_error", res.std_error},
           {"per_order_means", res.per_order_means},
           {"n", res.n},
           {"N", N},
           {"observable", a.source()},
           {"method", res.method},
           {"meta", detail_cli::base_meta(c, cfg, seed)}};
  out["meta"]["state_hash"] = state_hash(s);
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!c.out_path.empty()) atomic_write_file(c.out_path, text);
  return 0;
}

inline int cmd_converge(const detail_cli::Common& c) {
  const Json cfg = detail_cli::load_config(c.config_path);
  spectro::detail::check_keys(cfg, {"w", "observables", "orders", "eps_grid", "nodes", "seed"},
                              "converge config");
  const auto wv = spectro::detail::require<std::vector<double>>(cfg, "w", "converge config");
  if (wv.size() % 2 != 0) throw ConfigError("converge: w must have 2d entries");
  const int d = static_cast<int>(wv.size()) / 2;
  const PhasePoint w(std::vector<double>(wv.begin(), wv.begin() + d),
                     std::vector<double>(wv.begin() + d, wv.end()));
  const auto obs_src =
      spectro::detail::require<std::vector<std::string>>(cfg, "observables", "converge config");
  const auto orders = spectro::detail::require<std::vector<int>>(cfg, "orders", "converge config");
  const auto eps_grid =
      spectro::detail::require<std::vector<double>>(cfg, "eps_grid", "converge config");
  const int nodes = cfg.value("nodes", 0);

  std::vector<Observable> observables;
  for (const auto& src : obs_src) observables.push_back(Observable::parse(src, d));

  // Independent (observable, order) cells run on the worker pool.
  std::vector<std::vector<ConvergenceRow>> cells(observables.size() * orders.size());
  parallel_for(
      static_cast<long>(cells.size()),
      [&](long i) {
        const auto& a = observables[i / orders.size()];
        const int N = orders[i % orders.size()];
        cells[i] = convergence_experiment(w, {a}, {N}, eps_grid, nodes);
      },
      c.threads);

  const std::uint64_t seed = detail_cli::master_seed(c, cfg);
  Json meta = detail_cli::base_meta(c, cfg, seed);
  std::ostringstream os;
  os << csv_metadata(meta) << "eps,N,observable,error,slope_fit\n";
  for (const auto& cell : cells)
    for (const auto& row : cell)
      os << detail_cli::fmt(row.eps) << "," << row.order << ",\"" << row.observable << "\","
         << detail_cli::fmt(row.error) << "," << detail_cli::fmt(row.slope_fit) << "\n";
  atomic_write_file(c.out_path.empty() ? "converge.csv" : c.out_path, os.str());
  return 0;
}

inline int cmd_histogram(const detail_cli::Common& c) {
  const Json cfg = detail_cli::load_config(c.config_path);
  spectro::detail::check_keys(cfg, {"eps", "state", "N", "chain", "grid", "seed"}, "histogram config");
  const double eps = spectro::detail::require<double>(cfg, "eps", "histogram config");
  const State s = state_from_json(cfg.at("state"), eps);
  if (s.dim() != 1) throw ConfigError("histogram: d = 1 only");
  const int N = spectro::detail::require<int>(cfg, "N", "histogram config");
  ChainConfig chain = chain_from_json(cfg.at("chain"));
  const std::uint64_t seed = detail_cli::master_seed(c, cfg);

  HistogramGrid grid = HistogramGrid::centered(s.phase_center(), eps);
  if (cfg.contains("grid")) {
    const auto g = detail_cli::grid_from_json(cfg.at("grid"));
    grid = HistogramGrid{g.qmin, g.qmax, g.pmin, g.pmax, g.nq, g.np};
  }

  std::vector<SampleSet> sets(N);
  parallel_for(
      N,
      [&](long j) {
        ChainConfig sub = chain;
        sub.seed = spectro::detail::derive_stream(seed, 7000 + j);
        sets[j] = metropolis_chain(s, static_cast<int>(j), sub);
      },
      c.threads);
  const SignedGrid sg = weighted_histogram(sets, N, grid);

  Json meta = detail_cli::base_meta(c, cfg, seed);
  meta["state_hash"] = state_hash(s);
  meta["N"] = N;
  meta["signed_mass"] = sg.mass();
  std::ostringstream os;
  os << csv_metadata(meta) << "q,p,signed_density\n";
  for (int iq = 0; iq < grid.nq; ++iq)
    for (int ip = 0; ip < grid.np; ++ip)
      os << detail_cli::fmt(grid.q_center(iq)) << "," << detail_cli::fmt(grid.p_center(ip)) << ","
         << detail_cli::fmt(sg.at(iq, ip)) << "\n";
  atomic_write_file(c.out_path.empty() ? "histogram.csv" : c.out_path, os.str());
  return 0;
}

/// Entry point shared by the binary and the in-process CLI tests.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"Phase-space densities, sampling, and expectation values for high-frequency states"};
  app.require_subcommand(1);

  detail_cli::Common common;
  int dim = 1, order = 1;
  std::string grid_flag;
  std::uint64_t seed_flag = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* copt = sub->add_option("--config", common.config_path, "JSON run configuration");
    if (needs_config) copt->required();
    sub->add_option("--out", common.out_path, "output path (or prefix for sample)");
    sub->add_option("--seed", seed_flag, "master seed override")->each([&](const std::string&) {
      common.seed_override = seed_flag;
    });
    sub->add_option("--threads", common.threads, "worker threads (default: SPECTRO_THREADS or cores)");
  };

  auto* coeffs = app.add_subcommand("coeffs", "print the signed expansion weights");
  coeffs->add_option("--dim", dim, "space dimension d")->required();
  coeffs->add_option("--order", order, "expansion order N")->required();

  auto* density = app.add_subcommand("density", "evaluate a density on a grid (CSV)");
  add_common(density, true);
  density->add_option("--grid", grid_flag, "qmin:qmax:nq,pmin:pmax:np override");

  auto* sample = app.add_subcommand("sample", "run per-order Metropolis chains (CSV + JSON)");
  add_common(sample, true);

  auto* expect = app.add_subcommand("expect", "estimate an expectation value (JSON)");
  add_common(expect, true);

  auto* converge = app.add_subcommand("converge", "eps-convergence error table (CSV)");
  add_common(converge, true);

  auto* histogram = app.add_subcommand("histogram", "weighted signed histogram (CSV)");
  add_common(histogram, true);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (coeffs->parsed()) return cmd_coeffs(dim, order);
    if (density->parsed()) return cmd_density(common, grid_flag);
    if (sample->parsed()) return cmd_sample(common);
    if (expect->parsed()) return cmd_expect(common);
    if (converge->parsed()) return cmd_converge(common);
    if (histogram->parsed()) return cmd_histogram(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "observable parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spectro::cli
