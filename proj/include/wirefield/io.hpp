#pragma once

// Persistence and run configuration: field/history/mode CSV files, run
// summaries as JSON, and a flat key-value config format with CLI overrides.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wirefield/charge.hpp"
#include "wirefield/grid.hpp"
#include "wirefield/rhf.hpp"
#include "wirefield/tf.hpp"

namespace wirefield {

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary); // fixed newlines on every platform
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

} // namespace detail

// Row-major field dump, one node per line. Full round-trip precision.
inline void write_field_csv(const std::string& path, const ScalarField& u) {
  std::ofstream out = detail::open_out(path);
  out << "x,y,value\n";
  const Grid& g = u.grid;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j)
      out << detail::fmt17(g.x(i)) << ',' << detail::fmt17(g.y(j)) << ','
          << detail::fmt17(u(i, j)) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline ScalarField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,value", 0) != 0)
    throw std::runtime_error("bad field header in " + path);
  std::vector<double> xs, ys, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.c_str();
    char* e = nullptr;
    const double x = std::strtod(p, &e);
    if (e == p || *e != ',') throw std::runtime_error("bad field row in " + path);
    p = e + 1;
    const double y = std::strtod(p, &e);
    if (e == p || *e != ',') throw std::runtime_error("bad field row in " + path);
    p = e + 1;
    const double v = std::strtod(p, &e);
    if (e == p) throw std::runtime_error("bad field row in " + path);
    xs.push_back(x);
    ys.push_back(y);
    vs.push_back(v);
  }
  if (xs.empty()) throw std::runtime_error("empty field file: " + path);
  std::size_t nb = 1;
  while (nb < xs.size() && xs[nb] == xs[0]) ++nb;
  if (xs.size() % nb != 0) throw std::runtime_error("ragged field grid in " + path);
  const std::size_t na = xs.size() / nb;
  const Grid g = make_grid(-xs[0], -ys[0], int(na), int(nb));
  ScalarField u(g);
  u.values = std::move(vs);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const std::size_t a = i * nb + j;
      if (std::abs(xs[a] - g.x(int(i))) > 1e-9 * (std::abs(g.a) + 1.0) ||
          std::abs(ys[a] - g.y(int(j))) > 1e-9 * (std::abs(g.b) + 1.0))
        throw std::runtime_error("non-uniform node coordinates in " + path);
    }
  return u;
}

inline void write_history_csv(const std::string& path, const std::vector<HistoryRow>& h) {
  std::ofstream out = detail::open_out(path);
  out << "iter,energy,lambda,t\n";
  for (const auto& r : h)
    out << r.iteration << ',' << detail::fmt17(r.energy) << ',' << detail::fmt17(r.lambda)
        << ',' << detail::fmt17(r.t) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_modes_csv(const std::string& path, const ReducedState& s) {
  std::ofstream out = detail::open_out(path);
  out << "j,E_j,g_j\n";
  for (int j = 0; j < s.rank(); ++j) {
    const double ej = j < int(s.energies.size()) ? s.energies[j]
                                                 : std::numeric_limits<double>::quiet_NaN();
    out << j << ',' << detail::fmt17(ej) << ',' << detail::fmt17(s.g[j]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

enum class RunModel { tf_regularized, tf_log, rhf };

inline std::string run_model_name(RunModel m) {
  switch (m) {
    case RunModel::tf_regularized: return "tf-regularized";
    case RunModel::tf_log: return "tf-log";
    case RunModel::rhf: return "rhf";
  }
  throw std::logic_error("run_model_name");
}

inline RunModel parse_run_model(const std::string& s) {
  if (s == "tf-regularized") return RunModel::tf_regularized;
  if (s == "tf-log") return RunModel::tf_log;
  if (s == "rhf") return RunModel::rhf;
  throw std::invalid_argument("unknown model: " + s + " (expected tf-regularized, tf-log, rhf)");
}

struct RunConfig {
  RunModel model = RunModel::tf_regularized;
  double a = 8.0, b = 8.0;
  int na = 41, nb = 41;
  std::string mu_spec = "square-nanowire"; // or gaussian:cx,cy,sigma,charge or csv:path
  TFConfig solver;
  std::string out_dir = "out";
  long long seed = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
    throw std::invalid_argument("config key " + key + ": bad number '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config key " + key + ": bad integer '" + v + "'");
  return x;
}

} // namespace detail

// Flat `key = value` lines; '#' starts a comment; unknown keys are errors.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model") cfg.model = parse_run_model(value);
  else if (key == "a") cfg.a = detail::parse_double(key, value);
  else if (key == "b") cfg.b = detail::parse_double(key, value);
  else if (key == "na") cfg.na = int(detail::parse_int(key, value));
  else if (key == "nb") cfg.nb = int(detail::parse_int(key, value));
  else if (key == "mu") cfg.mu_spec = value;
  else if (key == "c_tf") {
    if (value == "wire") cfg.solver.c_tf = kCTFWire;
    else if (value == "semiclassical") cfg.solver.c_tf = kCTFSemiclassical;
    else cfg.solver.c_tf = detail::parse_double(key, value);
  }
  else if (key == "epsilon") cfg.solver.epsilon = detail::parse_double(key, value);
  else if (key == "max_iter") cfg.solver.max_iter = int(detail::parse_int(key, value));
  else if (key == "mixing_samples") cfg.solver.mixing_samples = int(detail::parse_int(key, value));
  else if (key == "lambda_bracket_growth")
    cfg.solver.lambda_bracket_growth = detail::parse_double(key, value);
  else if (key == "dichotomy_tol") cfg.solver.dichotomy_tol = detail::parse_double(key, value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "seed") cfg.seed = detail::parse_int(key, value);
  else throw std::invalid_argument("unknown config key: " + key);
}

inline RunConfig parse_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key or value");
    apply_config_entry(base, key, value);
  }
  return base;
}

// Build the charge distribution a config or preset string describes.
inline ChargeDistribution charge_from_spec(const std::string& spec, const Grid& g) {
  if (spec == "square-nanowire") return square_nanowire(g);
  if (spec.rfind("gaussian:", 0) == 0) {
    double cx, cy, sigma, q;
    if (std::sscanf(spec.c_str() + 9, "%lf,%lf,%lf,%lf", &cx, &cy, &sigma, &q) != 4)
      throw std::invalid_argument("bad gaussian spec (want gaussian:cx,cy,sigma,charge): " + spec);
    return gaussian_charge(g, cx, cy, sigma, q);
  }
  if (spec.rfind("csv:", 0) == 0) {
    ScalarField u = read_field_csv(spec.substr(4));
    if (!(u.grid == g))
      throw std::invalid_argument("charge file grid does not match the run grid: " + spec);
    return make_charge(std::move(u));
  }
  throw std::invalid_argument("unknown charge spec: " + spec);
}

inline nlohmann::ordered_json config_echo(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = run_model_name(cfg.model);
  j["a"] = cfg.a;
  j["b"] = cfg.b;
  j["na"] = cfg.na;
  j["nb"] = cfg.nb;
  j["mu"] = cfg.mu_spec;
  j["c_tf"] = cfg.solver.c_tf;
  j["epsilon"] = cfg.solver.epsilon;
  j["max_iter"] = cfg.solver.max_iter;
  j["mixing_samples"] = cfg.solver.mixing_samples;
  j["lambda_bracket_growth"] = cfg.solver.lambda_bracket_growth;
  j["dichotomy_tol"] = cfg.solver.dichotomy_tol;
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  return j;
}

inline nlohmann::ordered_json summary_json(const RunConfig& cfg, const EnergyBreakdown& e,
                                           double lambda, int iterations, bool converged,
                                           double wall_time_s) {
  nlohmann::ordered_json j;
  j["model"] = run_model_name(cfg.model);
  j["energy"] = {{"kinetic", e.kinetic}, {"hartree", e.hartree}, {"total", e.total}};
  j["lambda"] = lambda;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["wall_time_s"] = wall_time_s;
  j["grid"] = {{"a", cfg.a}, {"b", cfg.b}, {"na", cfg.na}, {"nb", cfg.nb}};
  j["config"] = config_echo(cfg);
  return j;
}

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out = detail::open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open json file: " + path);
  nlohmann::ordered_json j;
  in >> j;
  return j;
}

} // namespace wirefield
