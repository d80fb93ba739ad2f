#pragma once

#include <json.hpp>

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spectro/sampler.hpp"
#include "spectro/states.hpp"
#include "spectro/version.hpp"

namespace spectro {

using Json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Rejects unknown keys so that typos in configs fail loudly.
inline void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

template <class T>
T require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + std::string(key) + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + ": bad value for \"" + std::string(key) + "\": " + e.what());
  }
}

}  // namespace detail

inline Json quadrature_to_json(const QuadratureSpec& q) {
  return Json{{"kind", to_string(q.kind)}, {"nodes", q.nodes}, {"seed", q.rng_seed}};
}

inline QuadratureSpec quadrature_from_json(const Json& j) {
  detail::check_keys(j, {"kind", "nodes", "seed"}, "quadrature");
  QuadratureSpec q;
  q.kind = quad_kind_from_string(detail::require<std::string>(j, "kind", "quadrature"));
  q.nodes = detail::require<int>(j, "nodes", "quadrature");
  if (q.nodes < 1) throw ConfigError("quadrature: nodes must be >= 1");
  if (j.contains("seed")) q.rng_seed = j.at("seed").get<std::uint64_t>();
  return q;
}

inline Json state_to_json(const State& s) {
  const auto& pl = s.payload();
  if (const auto* g = std::get_if<GaussianPacket>(&pl))
    return Json{{"type", "gaussian"}, {"q", g->center.q}, {"p", g->center.p}};
  if (const auto* h = std::get_if<HermiteState>(&pl))
    return Json{{"type", "hermite"}, {"k", h->k.entries}};
  if (const auto* t = std::get_if<HatState>(&pl)) return Json{{"type", "hat"}, {"q", t->center_q}};
  const auto& sp = std::get<Superposition>(pl);
  Json terms = Json::array();
  for (size_t i = 0; i < sp.parts.size(); ++i)
    terms.push_back(Json{{"coeff", {sp.coeffs[i].real(), sp.coeffs[i].imag()}},
                         {"state", state_to_json(sp.parts[i])}});
  return Json{{"type", "superposition"}, {"terms", terms}};
}

inline State state_from_json(const Json& j, double eps) {
  const std::string type = detail::require<std::string>(j, "type", "state");
  if (type == "gaussian") {
    detail::check_keys(j, {"type", "q", "p"}, "state(gaussian)");
    auto q = detail::require<std::vector<double>>(j, "q", "state(gaussian)");
    auto p = detail::require<std::vector<double>>(j, "p", "state(gaussian)");
    if (q.size() != p.size()) throw ConfigError("state(gaussian): q and p sizes differ");
    return State::gaussian(eps, PhasePoint(std::move(q), std::move(p)));
  }
  if (type == "hermite") {
    detail::check_keys(j, {"type", "k"}, "state(hermite)");
    return State::hermite(eps, MultiIndex(detail::require<std::vector<int>>(j, "k", "state(hermite)")));
  }
  if (type == "hat") {
    detail::check_keys(j, {"type", "q"}, "state(hat)");
    return State::hat(eps, detail::require<double>(j, "q", "state(hat)"));
  }
  if (type == "superposition") {
    detail::check_keys(j, {"type", "terms"}, "state(superposition)");
    if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty())
      throw ConfigError("state(superposition): terms must be a nonempty array");
    std::vector<std::pair<std::complex<double>, State>> terms;
    for (const auto& t : j.at("terms")) {
      detail::check_keys(t, {"coeff", "state"}, "superposition term");
      auto c = detail::require<std::vector<double>>(t, "coeff", "superposition term");
      if (c.size() != 2) throw ConfigError("superposition term: coeff must be [re, im]");
      terms.emplace_back(std::complex<double>(c[0], c[1]),
                         state_from_json(t.at("state"), eps));
    }
    return State::superposition(std::move(terms));
  }
  throw ConfigError("state: unknown type \"" + type + "\"");
}

inline std::string state_hash(const State& s) {
  Json j = state_to_json(s);
  j["eps"] = s.eps();
  return detail::hex64(detail::fnv1a64(j.dump()));
}

inline Json chain_to_json(const ChainConfig& c) {
  return Json{{"n_samples", c.n_samples},        {"burn_in", c.burn_in},
              {"seed", c.seed},                  {"proposal_scale", c.proposal_scale},
              {"quad", quadrature_to_json(c.quad)}, {"n_chains", c.n_chains}};
}

inline ChainConfig chain_from_json(const Json& j) {
  detail::check_keys(j, {"n_samples", "burn_in", "seed", "proposal_scale", "quad", "n_chains", "initial"},
                     "chain");
  ChainConfig c;
  c.n_samples = detail::require<long>(j, "n_samples", "chain");
  if (j.contains("burn_in")) c.burn_in = j.at("burn_in").get<long>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("proposal_scale")) c.proposal_scale = j.at("proposal_scale").get<double>();
  if (j.contains("quad")) c.quad = quadrature_from_json(j.at("quad"));
  if (j.contains("n_chains")) c.n_chains = j.at("n_chains").get<int>();
  if (j.contains("initial")) {
    auto v = j.at("initial").get<std::vector<double>>();
    if (v.size() % 2 != 0) throw ConfigError("chain: initial must have 2d entries (q..., p...)");
    const int d = static_cast<int>(v.size()) / 2;
    c.initial = PhasePoint(std::vector<double>(v.begin(), v.begin() + d),
                           std::vector<double>(v.begin() + d, v.end()));
  }
  if (c.n_samples < 1 || c.burn_in < 0 || !(c.proposal_scale > 0))
    throw ConfigError("chain: need n_samples >= 1, burn_in >= 0, proposal_scale > 0");
  return c;
}

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe partial output.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path tmp = target.string() + ".tmp." + std::to_string(tick);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

/// '#'-prefixed metadata header common to all tabular outputs.
inline std::string csv_metadata(const Json& meta) {
  std::ostringstream os;
  os << "# spectro " << version_string << "\n";
  for (const auto& [k, v] : meta.items())
    os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  return os.str();
}

}  // namespace spectro
