#include "kgm/config.hpp"

#include "kgm/errors.hpp"
#include "kgm/expression.hpp"

#include <boost/program_options.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kgm {

namespace po = boost::program_options;

namespace {

double to_double(const std::string &key, const std::string &text) {
  const char *b = text.data();
  const char *e = b + text.size();
  while (b < e && *b == ' ')
    ++b;
  while (e > b && e[-1] == ' ')
    --e;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || end != e || !std::isfinite(v))
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

long to_integer(const std::string &key, const std::string &text) {
  const double v = to_double(key, text);
  if (v != std::floor(v))
    throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

std::vector<double> to_list(const std::string &key, const std::string &text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(to_double(key, item));
  if (out.empty())
    throw ConfigError("config key '" + key + "': empty list");
  return out;
}

// Minimum of V over a fine uniform lattice of [0, R] and the grid nodes.
double sampled_infimum(const std::function<double(double)> &V, double R, std::size_t N) {
  double v0 = V(0.0);
  constexpr int samples = 1 << 14;
  for (int i = 1; i <= samples; ++i)
    v0 = std::min(v0, V(R * i / samples));
  for (std::size_t j = 1; j <= N; ++j)
    v0 = std::min(v0, V(R * static_cast<double>(j) / static_cast<double>(N + 1)));
  return v0;
}

void resolve_infimum(RunConfig &cfg) {
  auto &V = cfg.params.potential;
  if (V.kind != PotentialKind::coercive || cfg.keys.count("potential.v0"))
    return;
  V.v0 = sampled_infimum(V.sampler, cfg.solver.R, cfg.solver.N);
  if (!std::isfinite(V.v0))
    throw ConfigError("potential.expr is not finite on [0, grid.R]");
}

} // namespace

void RunConfig::require_model() const {
  std::string missing;
  for (const char *k : {"s", "alpha", "p", "omega"})
    if (!keys.count(k))
      missing += std::string(missing.empty() ? "" : ", ") + k;
  if (!missing.empty())
    throw ConfigError("config is missing required keys: " + missing);
}

RunConfig parse_config(std::istream &in) {
  po::options_description desc;
  for (const char *k :
       {"s", "alpha", "p", "omega", "potential.kind", "potential.m", "potential.expr",
        "potential.v0", "grid.R", "grid.N", "solver.M", "solver.tol", "solver.max_iters",
        "solver.seed_amplitude", "solver.seed_width", "solver.phi_tol", "table.omegas",
        "table.points", "spectrum.K"})
    desc.add_options()(k, po::value<std::string>());

  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, desc, false), vm);
  } catch (const po::error &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  RunConfig cfg;
  auto get = [&](const char *k) -> std::optional<std::string> {
    if (!vm.count(k))
      return std::nullopt;
    cfg.keys.insert(k);
    return vm[k].as<std::string>();
  };
  if (auto v = get("s"))
    cfg.params.s = to_double("s", *v);
  if (auto v = get("alpha"))
    cfg.params.alpha = to_double("alpha", *v);
  if (auto v = get("p"))
    cfg.params.p = to_double("p", *v);
  if (auto v = get("omega"))
    cfg.params.omega = to_double("omega", *v);
  if (auto v = get("grid.R"))
    cfg.solver.R = to_double("grid.R", *v);
  if (auto v = get("grid.N")) {
    const long n = to_integer("grid.N", *v);
    if (n < 8)
      throw ConfigError("config key 'grid.N': need N >= 8");
    cfg.solver.N = static_cast<std::size_t>(n);
  }
  if (!(cfg.solver.R > 0.0))
    throw ConfigError("config key 'grid.R': must be positive");
  if (auto v = get("solver.M"))
    cfg.solver.M = static_cast<int>(to_integer("solver.M", *v));
  if (auto v = get("solver.tol"))
    cfg.solver.tol = to_double("solver.tol", *v);
  if (auto v = get("solver.max_iters"))
    cfg.solver.max_iters = static_cast<int>(to_integer("solver.max_iters", *v));
  if (auto v = get("solver.seed_amplitude"))
    cfg.solver.seed.amplitude = to_double("solver.seed_amplitude", *v);
  if (auto v = get("solver.seed_width"))
    cfg.solver.seed.width = to_double("solver.seed_width", *v);
  if (auto v = get("solver.phi_tol"))
    cfg.solver.phi_tol = to_double("solver.phi_tol", *v);
  if (auto v = get("table.omegas"))
    cfg.table_omegas = to_list("table.omegas", *v);
  if (auto v = get("table.points")) {
    const long n = to_integer("table.points", *v);
    if (n < 3)
      throw ConfigError("config key 'table.points': need at least 3 points");
    cfg.table_points = static_cast<std::size_t>(n);
  }
  if (auto v = get("spectrum.K")) {
    const long k = to_integer("spectrum.K", *v);
    if (k < 1)
      throw ConfigError("config key 'spectrum.K': must be positive");
    cfg.spectrum_K = static_cast<std::size_t>(k);
  }

  const std::string kind = get("potential.kind").value_or("constant");
  const auto m = get("potential.m");
  const auto expr = get("potential.expr");
  const auto v0 = get("potential.v0");
  if (kind == "constant") {
    if (expr || v0)
      throw ConfigError("potential.expr and potential.v0 apply to coercive potentials only");
    cfg.params.potential = PotentialSpec::constant(m ? to_double("potential.m", *m) : 1.0);
  } else if (kind == "coercive") {
    if (m)
      throw ConfigError("potential.m applies to constant potentials only");
    if (!expr)
      throw ConfigError("coercive potential needs potential.expr");
    const double inf = v0 ? to_double("potential.v0", *v0) : 0.0;
    cfg.params.potential = PotentialSpec::coercive(compile_expression(*expr), inf, *expr);
    resolve_infimum(cfg);
  } else {
    throw ConfigError("potential.kind must be 'constant' or 'coercive', got '" + kind + "'");
  }
  try {
    cfg.params.validate();
  } catch (const DomainError &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.solver.spectrum_K = 0;
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void apply_overrides(RunConfig &config, const Overrides &o) {
  if (o.R) {
    if (!(*o.R > 0.0))
      throw ConfigError("--R must be positive");
    config.solver.R = *o.R;
    config.keys.insert("grid.R");
  }
  if (o.N) {
    if (*o.N < 8)
      throw ConfigError("--N must be at least 8");
    config.solver.N = *o.N;
    config.keys.insert("grid.N");
  }
  if (o.tol)
    config.solver.tol = *o.tol;
  if (o.max_iters)
    config.solver.max_iters = *o.max_iters;
  if (o.seed_amplitude)
    config.solver.seed.amplitude = *o.seed_amplitude;
  if (o.seed_width)
    config.solver.seed.width = *o.seed_width;
  resolve_infimum(config);
}

unsigned threads_from_env() {
  const char *env = std::getenv("THREADS");
  if (!env)
    return 1;
  unsigned n = 0;
  const std::string s(env);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || end != s.data() + s.size() || n == 0)
    return 1;
  return n;
}

} // namespace kgm
