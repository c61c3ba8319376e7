#pragma once

// Thomas-Fermi mean-field solver on a rectangle: damped self-consistent field
// iteration for the regularized interaction, projected-gradient descent for
// the log interaction, and a comparison report between the two models.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wirefield/charge.hpp"
#include "wirefield/coulomb.hpp"
#include "wirefield/grid.hpp"

namespace wirefield {

// Kinetic prefactor of the confined wire model.
inline constexpr double kCTFWire = 2.0 * M_PI * M_PI / 3.0;
// Standard semiclassical constant, kept for experiments.
inline const double kCTFSemiclassical = 0.3 * std::pow(3.0 * M_PI * M_PI, 2.0 / 3.0);

enum class Model { regularized, log };

inline const char* model_name(Model m) {
  return m == Model::regularized ? "tf-regularized" : "tf-log";
}

struct TFConfig {
  double c_tf = kCTFWire;
  double epsilon = 1e-5;          // stop when |E_{n+1} - E_n| < epsilon
  int max_iter = 200;
  int mixing_samples = 11;        // uniform t samples on [0,1] before refinement
  double lambda_bracket_growth = 2.0;
  double dichotomy_tol = 1e-9;    // charge tolerance, relative to Z

  void validate() const {
    if (!(c_tf > 0.0)) throw std::invalid_argument("TFConfig: c_tf must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("TFConfig: epsilon must be positive");
    if (max_iter < 0) throw std::invalid_argument("TFConfig: max_iter must be >= 0");
    if (mixing_samples < 3) throw std::invalid_argument("TFConfig: mixing_samples must be >= 3");
    if (!(lambda_bracket_growth > 1.0))
      throw std::invalid_argument("TFConfig: lambda_bracket_growth must exceed 1");
    if (!(dichotomy_tol > 0.0)) throw std::invalid_argument("TFConfig: dichotomy_tol must be positive");
  }
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double hartree = 0.0; // one half of the quadratic interaction term
  double total = 0.0;
};

struct HistoryRow {
  int iteration = 0;
  double energy = 0.0;
  double lambda = 0.0;
  double t = 0.0;
};

struct TFResult {
  ScalarField rho;
  ScalarField potential; // interaction potential of rho - mu for the model used
  double lambda = 0.0;
  EnergyBreakdown energy;
  std::vector<HistoryRow> history;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline void check_nonnegative(const ScalarField& rho) {
  double scale = 0.0;
  for (double v : rho.values) scale = std::max(scale, std::abs(v));
  const double tol = -1e-12 * (scale + 1.0);
  for (double v : rho.values)
    if (v < tol) throw std::invalid_argument("density has negative values");
}

inline ScalarField model_potential(Model model, const ScalarField& f) {
  return model == Model::regularized ? mean_field_potential(f) : log_potential(f);
}

// The background shape scaled to the constrained charge. The sampled field can
// integrate to less than the declared Z (indicator edges fall on nodes), and
// the damped iteration preserves the mass of its start, so starting from the
// raw samples would converge to an infeasible point.
inline ScalarField feasible_start(const ChargeDistribution& mu) {
  const double mass = integrate(mu.field);
  if (!(mass > 0))
    throw std::invalid_argument("feasible_start: sampled charge has no mass on this grid");
  ScalarField rho = mu.field;
  const double k = mu.Z / mass;
  for (double& v : rho.values) v *= k;
  return rho;
}

inline double model_energy(Model model, const ScalarField& f, const ScalarField& g) {
  return model == Model::regularized ? hartree_energy(f, g) : log_energy(f, g);
}

inline double power_integral(const ScalarField& rho, double p) {
  const Grid& g = rho.grid;
  double s = 0.0;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j)
      s += g.weight(i, j) * std::pow(std::max(rho(i, j), 0.0), p);
  return s;
}

// Minimize a 1D function on [0,1]: coarse uniform sampling followed by a
// golden-section refinement around the best sample. Returns (t, E(t)); the
// coarse samples are kept as candidates so the result never exceeds E(0).
template <class F>
std::pair<double, double> minimize_on_unit_interval(F&& energy, int samples) {
  double best_t = 0.0;
  double best_e = std::numeric_limits<double>::infinity();
  int best_i = 0;
  std::vector<double> ts(samples), es(samples);
  for (int i = 0; i < samples; ++i) {
    ts[i] = double(i) / double(samples - 1);
    es[i] = energy(ts[i]);
    if (es[i] < best_e) { best_e = es[i]; best_t = ts[i]; best_i = i; }
  }
  double lo = ts[std::max(best_i - 1, 0)];
  double hi = ts[std::min(best_i + 1, samples - 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double ec = energy(c), ed = energy(d);
  for (int k = 0; k < 40 && hi - lo > 1e-10; ++k) {
    if (ec < ed) { hi = d; d = c; ed = ec; c = hi - gr * (hi - lo); ec = energy(c); }
    else         { lo = c; c = d; ec = ed; d = lo + gr * (hi - lo); ed = energy(d); }
  }
  if (ec < best_e) { best_e = ec; best_t = c; }
  if (ed < best_e) { best_e = ed; best_t = d; }
  return {best_t, best_e};
}

} // namespace detail

// rho^{TF}[V](lambda) = (3/(5 c_tf) (lambda - V)_+)^{3/2}
inline ScalarField density_from_potential(const ScalarField& V, double lambda, double c_tf) {
  ScalarField rho = V;
  const double a = 3.0 / (5.0 * c_tf);
  for (double& v : rho.values) {
    const double w = a * std::max(lambda - v, 0.0);
    v = w * std::sqrt(w);
  }
  return rho;
}

// Chemical potential solving integral(rho^{TF}[V](lambda)) = Z by bracketing
// and bisection. The initial bracket [min V, min V + 1] is grown geometrically.
inline double fermi_level(const ScalarField& V, double Z, double c_tf, const TFConfig& cfg = {}) {
  if (!(Z > 0.0)) throw std::invalid_argument("fermi_level: Z must be positive");
  const double vmin = *std::min_element(V.values.begin(), V.values.end());
  auto excess = [&](double lam) {
    return integrate(density_from_potential(V, lam, c_tf)) - Z;
  };
  double lo = vmin, width = 1.0;
  int grow = 0;
  while (excess(lo + width) < 0.0) {
    width *= cfg.lambda_bracket_growth;
    if (++grow > 200) throw std::runtime_error("fermi_level: bracket growth failed");
  }
  double hi = lo + width;
  const double tol = cfg.dichotomy_tol * Z;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double e = excess(mid);
    if (std::abs(e) <= tol) return mid;
    (e > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// E(rho) = c_tf * integral(rho^{5/3}) + 1/2 D(rho - mu, rho - mu)
inline EnergyBreakdown tf_energy(const ScalarField& rho, const ChargeDistribution& mu,
                                 const TFConfig& cfg = {}, Model model = Model::regularized) {
  check_same_grid(rho, mu.field, "tf_energy");
  detail::check_nonnegative(rho);
  EnergyBreakdown e;
  e.kinetic = cfg.c_tf * detail::power_integral(rho, 5.0 / 3.0);
  const ScalarField f = subtract(rho, mu.field);
  e.hartree = 0.5 * detail::model_energy(model, f, f);
  e.total = e.kinetic + e.hartree;
  return e;
}

// Damped SCF iteration: at each step solve the linearized problem at the
// current potential, then mix rho_{n+1} = rho_n + t (rho~ - rho_n) with t
// chosen by minimizing the exact energy along the segment. The interaction
// is quadratic in t, so the line search costs one extra potential per step.
inline TFResult scf_solve(const ChargeDistribution& mu, const TFConfig& cfg = {},
                          Model model = Model::regularized) {
  cfg.validate();
  const double Z = mu.Z;
  TFResult res;
  res.rho = detail::feasible_start(mu);

  ScalarField f = subtract(res.rho, mu.field);
  ScalarField V = detail::model_potential(model, f);
  double d00 = dot_weighted(V, f);
  double kin = cfg.c_tf * detail::power_integral(res.rho, 5.0 / 3.0);
  double energy = kin + 0.5 * d00;
  res.history.push_back({0, energy, 0.0, 0.0});

  for (int n = 1; n <= cfg.max_iter; ++n) {
    const double lambda = fermi_level(V, Z, cfg.c_tf, cfg);
    const ScalarField target = density_from_potential(V, lambda, cfg.c_tf);
    const ScalarField delta = subtract(target, res.rho);
    const ScalarField Vd = detail::model_potential(model, delta);
    const double d0d = dot_weighted(V, delta) + dot_weighted(Vd, f);
    const double ddd = dot_weighted(Vd, delta);

    const Grid& g = res.rho.grid;
    auto energy_at = [&](double t) {
      double k = 0.0;
      for (int i = 0; i < g.na; ++i)
        for (int j = 0; j < g.nb; ++j) {
          const double v = std::max(res.rho(i, j) + t * delta(i, j), 0.0);
          k += g.weight(i, j) * std::pow(v, 5.0 / 3.0);
        }
      return cfg.c_tf * k + 0.5 * (d00 + t * d0d + t * t * ddd);
    };
    auto [t, next_energy] = detail::minimize_on_unit_interval(energy_at, cfg.mixing_samples);

    // The potential is linear in its source, so V and D(f,f) update exactly.
    for (std::size_t a = 0; a < res.rho.values.size(); ++a) {
      res.rho.values[a] = std::max(res.rho.values[a] + t * delta.values[a], 0.0);
      f.values[a] += t * delta.values[a];
      V.values[a] += t * Vd.values[a];
    }
    d00 += t * d0d + t * t * ddd;

    res.history.push_back({n, next_energy, lambda, t});
    res.lambda = lambda;
    res.iterations = n;
    const double change = std::abs(next_energy - energy);
    energy = next_energy;
    if (change < cfg.epsilon) { res.converged = true; break; }
  }

  res.potential = V;
  res.energy.kinetic = cfg.c_tf * detail::power_integral(res.rho, 5.0 / 3.0);
  res.energy.hartree = 0.5 * d00;
  res.energy.total = res.energy.kinetic + res.energy.hartree;
  return res;
}

namespace detail {

// Euclidean projection (weighted by the quadrature) onto
// { rho >= 0, integral(rho) = Z }: water filling, rho = (v - theta)_+ with the
// threshold found by bisection.
inline double project_to_charge_simplex(std::vector<double>& v, const std::vector<double>& w,
                                        double Z) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, area = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    lo = std::min(lo, v[a]);
    hi = std::max(hi, v[a]);
    area += w[a];
  }
  lo -= Z / area + 1.0;
  auto charge = [&](double theta) {
    double s = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) s += w[a] * std::max(v[a] - theta, 0.0);
    return s;
  };
  for (int k = 0; k < 120; ++k) {
    const double mid = 0.5 * (lo + hi);
    (charge(mid) > Z ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  for (double& x : v) x = std::max(x - theta, 0.0);
  return theta;
}

} // namespace detail

// Projected-gradient descent for the log model on the constraint set
// { rho >= 0, integral(rho) = Z }, with Armijo backtracking. The lambda column
// of the history records the multiplier estimate recovered from the projection
// threshold; the t column records the accepted step size.
inline TFResult direct_minimize_log(const ChargeDistribution& mu, const TFConfig& cfg = {},
                                    const ScalarField* start = nullptr) {
  cfg.validate();
  const Grid& g = mu.field.grid;
  const double Z = mu.Z;

  TFResult res;
  res.rho = start ? *start : detail::feasible_start(mu);
  check_same_grid(res.rho, mu.field, "direct_minimize_log");

  std::vector<double> w(res.rho.values.size());
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) w[std::size_t(i) * g.nb + j] = g.weight(i, j);

  if (std::abs(integrate(res.rho) - Z) > kNeutralityTol * std::max(Z, 1.0))
    detail::project_to_charge_simplex(res.rho.values, w, Z);

  auto objective = [&](const ScalarField& rho) {
    const ScalarField f = subtract(rho, mu.field);
    return cfg.c_tf * detail::power_integral(rho, 5.0 / 3.0) + 0.5 * log_energy(f, f);
  };

  double energy = objective(res.rho);
  res.history.push_back({0, energy, 0.0, 0.0});
  double step = 1e-3;
  bool stalled = false;

  for (int n = 1; n <= cfg.max_iter; ++n) {
    const ScalarField f = subtract(res.rho, mu.field);
    const ScalarField V = log_potential(f);
    std::vector<double> grad(res.rho.values.size());
    for (std::size_t a = 0; a < grad.size(); ++a)
      grad[a] = (5.0 / 3.0) * cfg.c_tf * std::cbrt(res.rho.values[a] * res.rho.values[a]) +
                V.values[a];

    ScalarField trial = res.rho;
    double theta = 0.0, trial_energy = 0.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      trial = res.rho;
      for (std::size_t a = 0; a < grad.size(); ++a) trial.values[a] -= step * grad[a];
      theta = detail::project_to_charge_simplex(trial.values, w, Z);
      trial_energy = objective(trial);
      double decrease = 0.0; // Armijo model: <grad, rho_trial - rho>
      for (std::size_t a = 0; a < grad.size(); ++a)
        decrease += w[a] * grad[a] * (trial.values[a] - res.rho.values[a]);
      if (trial_energy <= energy + 1e-4 * decrease) { accepted = true; break; }
      step *= 0.5;
    }
    if (!accepted) { stalled = true; res.converged = true; break; }

    res.rho = std::move(trial);
    res.lambda = -theta / step; // multiplier of the charge constraint
    res.history.push_back({n, trial_energy, res.lambda, step});
    res.iterations = n;
    const double change = energy - trial_energy;
    energy = trial_energy;
    step *= 1.5;
    if (change < cfg.epsilon) { res.converged = true; break; }
  }
  (void)stalled;

  res.potential = log_potential(subtract(res.rho, mu.field));
  res.energy.kinetic = cfg.c_tf * detail::power_integral(res.rho, 5.0 / 3.0);
  res.energy.hartree = energy - res.energy.kinetic;
  res.energy.total = energy;
  return res;
}

struct ComparisonReport {
  double energy_regularized = 0.0;
  double energy_log = 0.0;
  double energy_gap_rel = 0.0;    // |E_reg - E_log| / |E_log|
  double potential_err_rel = 0.0; // gauge-fixed L2 error on the support mask
  double density_err_rel = 0.0;   // L2 error on the support mask
  int iterations_regularized = 0;
  int iterations_log = 0;
  double wall_time_regularized_s = 0.0; // filled by the harness when known
  double wall_time_log_s = 0.0;
  ScalarField potential_diff; // |V_reg - lambda - V_log|, zero off the mask
  ScalarField density_diff;   // |rho_reg - rho_log|, zero off the mask
};

// Support mask of mu dilated by `cells` in the Chebyshev metric.
inline std::vector<char> support_mask(const ScalarField& mu, int cells) {
  const Grid& g = mu.grid;
  std::vector<char> base(mu.values.size(), 0), out(mu.values.size(), 0);
  for (std::size_t a = 0; a < base.size(); ++a) base[a] = mu.values[a] > 0.0 ? 1 : 0;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) {
      char hit = 0;
      for (int di = -cells; di <= cells && !hit; ++di)
        for (int dj = -cells; dj <= cells && !hit; ++dj) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < g.na && jj >= 0 && jj < g.nb && base[std::size_t(ii) * g.nb + jj])
            hit = 1;
        }
      out[std::size_t(i) * g.nb + j] = hit;
    }
  return out;
}

// Model discrepancy between a regularized-model solution and a log-model
// solution of the same problem. The potentials are compared in the gauge
// V_reg - lambda_reg against V_log, restricted to the support of mu dilated
// by two cells; errors are relative L2 with the log solution as reference.
inline ComparisonReport compare(const TFResult& reg, const TFResult& log_res,
                                const ChargeDistribution& mu) {
  check_same_grid(reg.rho, log_res.rho, "compare");
  check_same_grid(reg.rho, mu.field, "compare");
  const Grid& g = mu.field.grid;
  const std::vector<char> mask = support_mask(mu.field, 2);

  ComparisonReport rep;
  rep.energy_regularized = reg.energy.total;
  rep.energy_log = log_res.energy.total;
  rep.energy_gap_rel = std::abs(reg.energy.total - log_res.energy.total) /
                       std::abs(log_res.energy.total);
  rep.iterations_regularized = reg.iterations;
  rep.iterations_log = log_res.iterations;
  rep.potential_diff = ScalarField(g);
  rep.density_diff = ScalarField(g);

  double pnum = 0.0, pden = 0.0, rnum = 0.0, rden = 0.0;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) {
      const std::size_t a = std::size_t(i) * g.nb + j;
      if (!mask[a]) continue;
      const double wq = g.weight(i, j);
      const double dv = reg.potential(i, j) - reg.lambda - log_res.potential(i, j);
      const double dr = reg.rho(i, j) - log_res.rho(i, j);
      rep.potential_diff.values[a] = std::abs(dv);
      rep.density_diff.values[a] = std::abs(dr);
      pnum += wq * dv * dv;
      pden += wq * log_res.potential(i, j) * log_res.potential(i, j);
      rnum += wq * dr * dr;
      rden += wq * log_res.rho(i, j) * log_res.rho(i, j);
    }
  rep.potential_err_rel = std::sqrt(pnum / pden);
  rep.density_err_rel = std::sqrt(rnum / rden);
  return rep;
}

} // namespace wirefield
