// Command-line harness: runs a solver from a config file or a named preset,
// compares a regularized-model run against a log-model run, and samples charge
// presets to CSV. Exit codes: 0 success, 1 configuration error (no artifacts
// written), 2 solver non-convergence (artifacts still written).
//
// Thread count: the kernel sums honor OMP_NUM_THREADS; the eigensolver honors
// OPENBLAS_NUM_THREADS.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "wirefield/io.hpp"

namespace fs = std::filesystem;
using namespace wirefield;

namespace {

RunConfig preset_config(const std::string& name) {
  RunConfig cfg; // defaults: 16 x 16 box, 41 x 41 nodes, unit square charge
  if (name == "paper-mu1-regularized") {
    cfg.model = RunModel::tf_regularized;
    cfg.out_dir = "run-mu1-regularized";
  } else if (name == "paper-mu1-log") {
    cfg.model = RunModel::tf_log;
    cfg.out_dir = "run-mu1-log";
  } else if (name == "paper-mu1-rhf") {
    cfg.model = RunModel::rhf;
    cfg.out_dir = "run-mu1-rhf";
  } else {
    throw std::invalid_argument("unknown preset: " + name +
                                " (known: paper-mu1-regularized, paper-mu1-log, paper-mu1-rhf)");
  }
  return cfg;
}

struct SolveOutputs {
  ScalarField rho;
  ScalarField potential;
  double lambda = 0.0;
  EnergyBreakdown energy;
  std::vector<HistoryRow> history;
  bool converged = false;
  int iterations = 0;
  std::optional<ReducedState> state; // spectral runs only
};

int do_solve(const RunConfig& cfg) {
  cfg.solver.validate();
  const Grid grid = make_grid(cfg.a, cfg.b, cfg.na, cfg.nb);
  const ChargeDistribution mu = charge_from_spec(cfg.mu_spec, grid);

  const auto t0 = std::chrono::steady_clock::now();
  SolveOutputs out;
  switch (cfg.model) {
    case RunModel::tf_regularized: {
      TFResult r = scf_solve(mu, cfg.solver, Model::regularized);
      out = {std::move(r.rho), std::move(r.potential), r.lambda, r.energy,
             std::move(r.history), r.converged, r.iterations, std::nullopt};
      break;
    }
    case RunModel::tf_log: {
      TFResult r = direct_minimize_log(mu, cfg.solver);
      out = {std::move(r.rho), std::move(r.potential), r.lambda, r.energy,
             std::move(r.history), r.converged, r.iterations, std::nullopt};
      break;
    }
    case RunModel::rhf: {
      RHFResult r = rhf_scf(mu, cfg.solver);
      out = {std::move(r.rho), std::move(r.potential), r.lambda, r.energy,
             std::move(r.history), r.converged, r.iterations, std::move(r.state)};
      break;
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  write_field_csv((dir / "rho.csv").string(), out.rho);
  write_field_csv((dir / "potential.csv").string(), out.potential);
  write_field_csv((dir / "mu.csv").string(), mu.field);
  write_history_csv((dir / "history.csv").string(), out.history);
  if (out.state) write_modes_csv((dir / "modes.csv").string(), *out.state);
  write_json((dir / "summary.json").string(),
             summary_json(cfg, out.energy, out.lambda, out.iterations, out.converged, wall));

  std::printf("%s: E = %.10g (kinetic %.10g, interaction %.10g), lambda = %.10g, "
              "%d iterations, %s, %.2f s\n",
              run_model_name(cfg.model).c_str(), out.energy.total, out.energy.kinetic,
              out.energy.hartree, out.lambda, out.iterations,
              out.converged ? "converged" : "NOT converged", wall);
  std::printf("artifacts: %s\n", fs::absolute(dir).string().c_str());
  return out.converged ? 0 : 2;
}

TFResult load_run(const fs::path& dir, const nlohmann::ordered_json& summary) {
  TFResult r;
  r.rho = read_field_csv((dir / "rho.csv").string());
  r.potential = read_field_csv((dir / "potential.csv").string());
  r.lambda = summary.at("lambda").get<double>();
  r.energy.kinetic = summary.at("energy").at("kinetic").get<double>();
  r.energy.hartree = summary.at("energy").at("hartree").get<double>();
  r.energy.total = summary.at("energy").at("total").get<double>();
  r.iterations = summary.at("iterations").get<int>();
  r.converged = summary.at("converged").get<bool>();
  return r;
}

int do_compare(const std::string& dir_reg, const std::string& dir_log,
               const std::string& out_dir) {
  const fs::path d1(dir_reg), d2(dir_log);
  const auto s1 = read_json((d1 / "summary.json").string());
  const auto s2 = read_json((d2 / "summary.json").string());
  if (s1.at("model") != "tf-regularized" || s2.at("model") != "tf-log")
    throw std::invalid_argument("compare expects a tf-regularized directory then a tf-log one");

  TFResult reg = load_run(d1, s1);
  TFResult log_res = load_run(d2, s2);
  if (!(reg.rho.grid == log_res.rho.grid))
    throw std::invalid_argument("compare: the two runs use different grids");
  ChargeDistribution mu = make_charge(read_field_csv((d1 / "mu.csv").string()));
  if (!(mu.field.grid == reg.rho.grid))
    throw std::invalid_argument("compare: mu grid does not match the run grid");

  ComparisonReport rep = compare(reg, log_res, mu);
  rep.wall_time_regularized_s = s1.at("wall_time_s").get<double>();
  rep.wall_time_log_s = s2.at("wall_time_s").get<double>();

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  nlohmann::ordered_json j;
  j["energy_reg"] = rep.energy_regularized;
  j["energy_log"] = rep.energy_log;
  j["energy_gap_rel"] = rep.energy_gap_rel;
  j["potential_err_rel"] = rep.potential_err_rel;
  j["density_err_rel"] = rep.density_err_rel;
  j["iterations_reg"] = rep.iterations_regularized;
  j["iterations_log"] = rep.iterations_log;
  j["wall_time_reg_s"] = rep.wall_time_regularized_s;
  j["wall_time_log_s"] = rep.wall_time_log_s;
  write_json((out / "comparison.json").string(), j);
  write_field_csv((out / "dV.csv").string(), rep.potential_diff);
  write_field_csv((out / "drho.csv").string(), rep.density_diff);

  std::printf("energy gap %.4g%%, potential error %.4g%%, density error %.4g%% "
              "(gauge-shifted, on the dilated support)\n",
              100.0 * rep.energy_gap_rel, 100.0 * rep.potential_err_rel,
              100.0 * rep.density_err_rel);
  std::printf("artifacts: %s\n", fs::absolute(out).string().c_str());
  return 0;
}

int do_emit_mu(const std::string& preset, const std::string& grid_spec,
               const std::string& out_file) {
  double a, b;
  int na, nb;
  if (std::sscanf(grid_spec.c_str(), "%lf,%lf,%d,%d", &a, &b, &na, &nb) != 4)
    throw std::invalid_argument("bad --grid (want a,b,Na,Nb): " + grid_spec);
  const Grid grid = make_grid(a, b, na, nb);
  const ChargeDistribution mu = charge_from_spec(preset, grid);
  write_field_csv(out_file, mu.field);
  std::printf("charge (discrete quadrature): %.10g\n", mu.Z);
  if (preset == "square-nanowire")
    std::printf("analytic charge of the unit-density 4x4 square: 16\n");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D mean-field nanowire solvers: Thomas-Fermi (regularized and log "
               "interactions) and the reduced spectral model"};
  app.require_subcommand(1);

  std::string config_path, preset, model_flag, out_flag;
  long long seed_flag = 0;
  bool seed_set = false;

  auto* solve = app.add_subcommand("solve", "run one solver and write artifacts");
  solve->add_option("--config", config_path, "flat key = value config file");
  solve->add_option("--preset", preset, "named setup: paper-mu1-regularized, paper-mu1-log, paper-mu1-rhf");
  solve->add_option("--model", model_flag, "override model: tf-regularized, tf-log, rhf");
  solve->add_option("--out", out_flag, "override output directory");
  solve->add_option("--seed", seed_flag, "seed echoed into the summary");

  std::string cmp_reg, cmp_log, cmp_out = "comparison";
  auto* cmp = app.add_subcommand("compare", "compare a regularized run with a log run");
  cmp->add_option("dir_reg", cmp_reg, "artifacts of the tf-regularized run")->required();
  cmp->add_option("dir_log", cmp_log, "artifacts of the tf-log run")->required();
  cmp->add_option("--out", cmp_out, "output directory");

  std::string mu_preset, mu_grid, mu_out;
  auto* emit = app.add_subcommand("emit-mu", "sample a charge preset to CSV");
  emit->add_option("--preset", mu_preset, "square-nanowire or gaussian:cx,cy,sigma,charge")
      ->required();
  emit->add_option("--grid", mu_grid, "a,b,Na,Nb")->required();
  emit->add_option("--out", mu_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      if (config_path.empty() && preset.empty())
        throw std::invalid_argument("solve needs --config and/or --preset");
      RunConfig cfg = preset.empty() ? RunConfig{} : preset_config(preset);
      if (!config_path.empty()) cfg = parse_config_file(config_path, cfg);
      if (!model_flag.empty()) cfg.model = parse_run_model(model_flag);
      if (!out_flag.empty()) cfg.out_dir = out_flag;
      seed_set = solve->count("--seed") > 0;
      if (seed_set) cfg.seed = seed_flag;
      return do_solve(cfg);
    }
    if (cmp->parsed()) return do_compare(cmp_reg, cmp_log, cmp_out);
    if (emit->parsed()) return do_emit_mu(mu_preset, mu_grid, mu_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
