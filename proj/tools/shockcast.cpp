#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shockcast/fit.hpp"
#include "shockcast/horseshoe.hpp"
#include "shockcast/json_io.hpp"
#include "shockcast/manifest.hpp"
#include "shockcast/panel.hpp"
#include "shockcast/projection.hpp"
#include "shockcast/svg.hpp"
#include "shockcast/synthetic.hpp"
#include "shockcast/validation.hpp"

namespace fs = std::filesystem;
using namespace shockcast;

namespace {

// Exit codes: 0 ok, 1 runtime failure, 2 usage error, 3 convergence gate.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceGate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) {
    throw UsageError(std::string(what) + " not found: " + path);
  }
}

void prepare_out_dir(const std::string& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) {
      throw std::runtime_error("output directory " + dir +
                               " exists and is not empty; pass --force to overwrite");
    }
  }
  fs::create_directories(dir);
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  return out;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct CommonFitArgs {
  std::string data_path;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool force = false;
  bool no_shocks = false;
  bool allow_unconverged = false;
  std::optional<int> chains, warmup, sampling;
  std::optional<double> tau0, slab_scale, target_accept;
};

void add_sampler_flags(CLI::App* cmd, CommonFitArgs& args) {
  cmd->add_option("--chains", args.chains, "MCMC chains (default 4)");
  cmd->add_option("--warmup", args.warmup, "warmup iterations per chain (default 500)");
  cmd->add_option("--sampling", args.sampling, "sampling iterations per chain (default 1000)");
  cmd->add_option("--target-accept", args.target_accept, "dual-averaging target (default 0.8)");
}

std::pair<ModelConfig, SamplerConfig> resolve_configs(const CommonFitArgs& args) {
  ModelConfig model;
  SamplerConfig sampler;
  if (!args.config_path.empty()) {
    require_file(args.config_path, "config file");
    auto j = read_json_file(args.config_path);
    model = model_config_from_json(j);
    if (j.contains("sampler")) sampler = sampler_config_from_json(j.at("sampler"));
  }
  if (args.no_shocks) model.horseshoe.shocks_enabled = false;
  if (args.tau0) model.horseshoe.tau0 = *args.tau0;
  if (args.slab_scale) model.horseshoe.slab_scale = *args.slab_scale;
  if (args.chains) sampler.n_chains = *args.chains;
  if (args.warmup) sampler.n_warmup = *args.warmup;
  if (args.sampling) sampler.n_sampling = *args.sampling;
  if (args.target_accept) sampler.target_accept = *args.target_accept;
  sampler.seed = args.seed;
  return {model, sampler};
}

nlohmann::json convergence_json(const ConvergenceSummary& c) {
  return {{"max_rhat", c.max_rhat},
          {"worst_rhat_parameter", c.worst_rhat_parameter},
          {"min_ess", c.min_ess},
          {"divergence_rate", c.divergence_rate},
          {"converged", c.converged}};
}

int cmd_fit(const CommonFitArgs& args) {
  require_file(args.data_path, "data file");
  auto [model_config, sampler_config] = resolve_configs(args);
  SeriesPanel panel = load_panel(args.data_path);
  prepare_out_dir(args.out_dir, args.force);

  Timer timer;
  FitResult fit = run_fit(panel, model_config, sampler_config);
  save_fit(fit, args.out_dir);

  RunManifest manifest;
  manifest.command = args.no_shocks ? "fit --no-shocks" : "fit";
  manifest.started_at = utc_timestamp();
  manifest.seed = args.seed;
  manifest.config = {{"model", model_config_to_json(fit.config)},
                     {"sampler", sampler_config_to_json(sampler_config)}};
  manifest.add_input(args.data_path);
  if (!args.config_path.empty()) manifest.add_input(args.config_path);
  manifest.elapsed_seconds = timer.seconds();
  manifest.extra = convergence_json(fit.convergence);
  manifest.write((fs::path(args.out_dir) / "manifest.json").string());

  std::printf("fit: %d countries, %d periods, %d parameters\n", panel.n_countries(),
              panel.n_periods(), fit.draws.n_parameters());
  std::printf("max split-Rhat %.4f (%s), min ESS %.0f, divergence rate %.3f%%\n",
              fit.convergence.max_rhat, fit.convergence.worst_rhat_parameter.c_str(),
              fit.convergence.min_ess, 100.0 * fit.convergence.divergence_rate);
  if (!fit.convergence.converged) {
    if (!args.allow_unconverged) {
      throw ConvergenceGate("fit did not converge: max split-Rhat " +
                            std::to_string(fit.convergence.max_rhat) + " > " +
                            std::to_string(fit.convergence.rhat_threshold) +
                            " (rerun with more iterations or --allow-unconverged)");
    }
    std::printf("[warning] fit not converged; artifacts written anyway (--allow-unconverged)\n");
  }
  return 0;
}

int cmd_tune_prior(const std::string& config_path, double delta_star_flag,
                   const std::string& from_fit, const std::string& grid_csv, std::int64_t sims,
                   std::uint64_t seed, const std::string& out_dir, bool force) {
  HorseshoeConfig config;
  if (!config_path.empty()) {
    require_file(config_path, "config file");
    config = model_config_from_json(read_json_file(config_path)).horseshoe;
  }
  double delta_star = delta_star_flag;
  if (delta_star <= 0.0) {
    if (from_fit.empty()) {
      throw UsageError("tune-prior needs either --delta-star or --from-fit");
    }
    FitResult fit = load_fit(from_fit);
    delta_star = shock_threshold(fit.draws);
    std::printf("delta* = 2 x median tau_eps from %s = %.4f years\n", from_fit.c_str(),
                delta_star);
  }
  std::vector<double> grid = parse_grid(grid_csv);
  if (grid.empty()) throw UsageError("tune-prior: empty tau0 grid");

  Timer timer;
  auto rows = prior_predictive_tune(grid, config, delta_star, sims, seed);

  CsvTable table;
  table.header = {"tau0", "estimate", "mc_se"};
  std::printf("%10s %12s %12s\n", "tau0", "P(d>d*)", "mc_se");
  for (const auto& row : rows) {
    char a[40], b[40], c[40];
    std::snprintf(a, sizeof(a), "%.9g", row.tau0);
    std::snprintf(b, sizeof(b), "%.9g", row.estimate);
    std::snprintf(c, sizeof(c), "%.9g", row.mc_se);
    table.rows.push_back({a, b, c});
    std::printf("%10g %12.6g %12.3g\n", row.tau0, row.estimate, row.mc_se);
  }
  if (!out_dir.empty()) {
    prepare_out_dir(out_dir, force);
    write_csv((fs::path(out_dir) / "tuning.csv").string(), table);
    RunManifest manifest;
    manifest.command = "tune-prior";
    manifest.started_at = utc_timestamp();
    manifest.seed = seed;
    manifest.config = {{"horseshoe",
                        {{"tau0_grid", grid},
                         {"nu", config.nu},
                         {"slab_scale", config.slab_scale},
                         {"delta_star", delta_star},
                         {"n_sims", sims}}}};
    manifest.elapsed_seconds = timer.seconds();
    manifest.write((fs::path(out_dir) / "manifest.json").string());
  }
  return 0;
}

int cmd_project(const std::string& fit_dir, int horizon, const std::string& mode_str,
                const std::string& quantiles_csv, std::uint64_t seed, bool allow_unconverged,
                const std::string& crisis_country, const std::string& crisis_period,
                double crisis_gamma, const std::string& out_dir, bool force) {
  require_file(fit_dir, "fit directory");
  FitResult fit = load_fit(fit_dir);

  ProjectionConfig config;
  config.horizon = horizon;
  config.mode = projection_mode_from_string(mode_str);
  config.seed = seed;
  config.allow_unconverged = allow_unconverged;
  if (!quantiles_csv.empty()) config.quantiles = parse_grid(quantiles_csv);
  if (!crisis_country.empty()) {
    config.crisis = CrisisSpec{crisis_country, Period::parse(crisis_period), crisis_gamma};
    std::printf("[experimental] crisis-conditional projection for %s at %s (gamma = %g)\n",
                crisis_country.c_str(), crisis_period.c_str(), crisis_gamma);
  }

  Timer timer;
  ProjectionFan fan;
  try {
    fan = project(fit, config);
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("not converged") != std::string::npos) {
      throw ConvergenceGate(e.what());
    }
    throw;
  }

  prepare_out_dir(out_dir, force);
  write_csv((fs::path(out_dir) / "fan.csv").string(), fan_to_csv(fan));
  for (int c = 0; c < static_cast<int>(fan.countries.size()); ++c) {
    std::ofstream svg((fs::path(out_dir) / ("fan_" + fan.countries[c] + ".svg")).string());
    svg << render_fan_svg(fit.panel, c, fan);
  }

  RunManifest manifest;
  manifest.command = "project";
  manifest.started_at = utc_timestamp();
  manifest.seed = seed;
  manifest.config = {{"projection",
                      {{"horizon", horizon},
                       {"mode", to_string(config.mode)},
                       {"quantiles", config.quantiles},
                       {"fit", fit_dir}}}};
  manifest.add_input((fs::path(fit_dir) / "draws.csv").string());
  manifest.elapsed_seconds = timer.seconds();
  manifest.write((fs::path(out_dir) / "manifest.json").string());

  std::printf("projected %zu countries x %d periods (%s), last period %s\n",
              fan.countries.size(), horizon, to_string(fan.mode).c_str(),
              fan.periods.back().label().c_str());
  return 0;
}

int cmd_detect(const std::string& fit_dir, double delta_star_flag, double prob_threshold,
               const std::string& out_dir, bool force) {
  require_file(fit_dir, "fit directory");
  FitResult fit = load_fit(fit_dir);
  double delta_star = delta_star_flag > 0.0 ? delta_star_flag : shock_threshold(fit.draws);

  Timer timer;
  ShockReport report = detect_shocks(fit, delta_star, prob_threshold);

  prepare_out_dir(out_dir, force);
  write_csv((fs::path(out_dir) / "shocks.csv").string(), shock_report_to_csv(report));
  for (int c = 0; c < fit.panel.n_countries(); ++c) {
    bool any = false;
    for (const auto& cell : report.cells) {
      if (cell.flagged && cell.country == fit.panel.country(c)) any = true;
    }
    if (!any) continue;
    std::ofstream svg((fs::path(out_dir) / ("shock_" + fit.panel.country(c) + ".svg")).string());
    svg << render_shock_svg(fit.panel, c, report);
  }

  RunManifest manifest;
  manifest.command = "detect";
  manifest.started_at = utc_timestamp();
  manifest.seed = 0;
  manifest.config = {{"detect", {{"delta_star", delta_star}, {"prob_threshold", prob_threshold}}}};
  manifest.add_input((fs::path(fit_dir) / "draws.csv").string());
  manifest.elapsed_seconds = timer.seconds();
  manifest.extra = {{"n_flagged", report.n_flagged()}};
  manifest.write((fs::path(out_dir) / "manifest.json").string());

  std::printf("delta* = %.4f years; %d country-periods flagged at P(delta > delta*) > %g\n",
              delta_star, report.n_flagged(), prob_threshold);
  for (const auto& cell : report.cells) {
    if (cell.flagged) {
      std::printf("  %s %s: median delta %.2f y (95%% CI %.2f-%.2f), exceedance %.3f\n",
                  cell.country.c_str(), cell.period.label().c_str(), cell.median_delta,
                  cell.ci_low, cell.ci_high, cell.exceedance);
    }
  }
  return 0;
}

int cmd_validate(const CommonFitArgs& args, const std::string& cutoff, const std::string& target) {
  require_file(args.data_path, "data file");
  auto [model_config, sampler_config] = resolve_configs(args);
  SeriesPanel panel = load_panel(args.data_path);

  ValidationOptions options;
  options.cutoff = Period::parse(cutoff);
  options.target = Period::parse(target);
  options.sampler = sampler_config;
  options.projection_seed = args.seed;

  ModelConfig shocks = model_config;
  shocks.horseshoe.shocks_enabled = true;
  ModelConfig no_shocks = model_config;
  no_shocks.horseshoe.shocks_enabled = false;
  std::vector<ValidationModelSpec> models{{"shocks", shocks}, {"no shocks", no_shocks}};

  Timer timer;
  ValidationReport report = validate(panel, models, options);

  prepare_out_dir(args.out_dir, args.force);
  write_csv((fs::path(args.out_dir) / "report.csv").string(), metric_table_csv(report));
  std::string text = metric_table_text(report);
  {
    std::ofstream out((fs::path(args.out_dir) / "report.txt").string());
    out << text;
  }
  for (const auto& mv : report.models) {
    std::string slug = mv.label;
    for (auto& ch : slug) {
      if (ch == ' ') ch = '_';
    }
    write_csv((fs::path(args.out_dir) / ("fan_" + slug + ".csv")).string(), fan_to_csv(mv.fan));
  }

  RunManifest manifest;
  manifest.command = "validate";
  manifest.started_at = utc_timestamp();
  manifest.seed = args.seed;
  manifest.config = {{"model", model_config_to_json(model_config)},
                     {"sampler", sampler_config_to_json(sampler_config)},
                     {"cutoff", cutoff},
                     {"target", target}};
  manifest.add_input(args.data_path);
  manifest.elapsed_seconds = timer.seconds();
  manifest.write((fs::path(args.out_dir) / "manifest.json").string());

  std::fputs(text.c_str(), stdout);
  return 0;
}

int cmd_simulate(const std::string& spec_path, bool demo, int n_countries, int n_periods,
                 double tau_eps, const std::vector<std::string>& shock_args, std::uint64_t seed,
                 const std::string& out_dir, bool force) {
  SyntheticSpec spec;
  if (!spec_path.empty()) {
    require_file(spec_path, "synthetic spec");
    spec = synthetic_spec_from_json(read_json_file(spec_path));
  } else if (demo) {
    spec = default_synthetic(n_countries, n_periods, seed);
    spec.tau_eps = tau_eps;
  } else {
    throw UsageError("simulate needs --spec FILE or --demo");
  }
  for (const auto& arg : shock_args) {
    int country = 0, period = 0;
    double magnitude = 0.0;
    if (std::sscanf(arg.c_str(), "%d:%d:%lf", &country, &period, &magnitude) != 3) {
      throw UsageError("--shock expects COUNTRY_INDEX:PERIOD_INDEX:MAGNITUDE, got " + arg);
    }
    spec.shocks.push_back({country, period, magnitude});
  }

  SyntheticResult result = simulate_panel(spec);
  prepare_out_dir(out_dir, force);
  write_panel(result.panel, (fs::path(out_dir) / "panel.csv").string());
  write_json_file((fs::path(out_dir) / "truth.json").string(),
                  synthetic_spec_to_json(result.truth));

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.started_at = utc_timestamp();
  manifest.seed = spec.seed;
  manifest.config = {{"synthetic", synthetic_spec_to_json(result.truth)}};
  if (!spec_path.empty()) manifest.add_input(spec_path);
  manifest.write((fs::path(out_dir) / "manifest.json").string());

  std::printf("simulated %d countries x %d periods -> %s\n", spec.n_countries, spec.n_periods,
              out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& fit_dir) {
  require_file(fit_dir, "fit directory");
  FitResult fit = load_fit(fit_dir);
  const auto& c = fit.convergence;
  std::printf("fit %s\n", fit_dir.c_str());
  std::printf("  countries: %d, periods: %d, parameters: %d, draws: %d x %d chains\n",
              fit.panel.n_countries(), fit.panel.n_periods(), fit.draws.n_parameters(),
              fit.draws.n_iterations(), fit.draws.n_chains());
  std::printf("  shocks enabled: %s\n", fit.config.horseshoe.shocks_enabled ? "yes" : "no");
  std::printf("  converged: %s (max split-Rhat %.4f @ %s, threshold %.2f)\n",
              c.converged ? "yes" : "no", c.max_rhat, c.worst_rhat_parameter.c_str(),
              c.rhat_threshold);
  std::printf("  min ESS: %.0f (%s), divergence rate %.3f%%\n", c.min_ess,
              c.worst_ess_parameter.c_str(), 100.0 * c.divergence_rate);
  std::printf("  posterior median tau_eps: %.4f years (delta* = %.4f)\n",
              median(fit.draws.column("tau_eps")), shock_threshold(fit.draws));
  if (fit.config.horseshoe.shocks_enabled) {
    ShockReport report = detect_shocks(fit, shock_threshold(fit.draws));
    std::printf("  shock cells flagged at 0.975: %d of %zu\n", report.n_flagged(),
                report.cells.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shockcast: Bayesian transition-model fits, shock detection, and projections "
               "for multi-population indicator panels"};
  app.require_subcommand(1);

  // fit
  CommonFitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit the transition model to a panel");
  fit_cmd->add_option("--data", fit_args.data_path, "panel CSV")->required();
  fit_cmd->add_option("--config", fit_args.config_path, "model/sampler config JSON");
  fit_cmd->add_option("--out", fit_args.out_dir, "output directory")->required();
  fit_cmd->add_option("--seed", fit_args.seed, "RNG seed");
  fit_cmd->add_flag("--force", fit_args.force, "overwrite the output directory");
  fit_cmd->add_flag("--no-shocks", fit_args.no_shocks, "fit the model without shock terms");
  fit_cmd->add_flag("--allow-unconverged", fit_args.allow_unconverged,
                    "do not fail on the convergence gate");
  fit_cmd->add_option("--tau0", fit_args.tau0, "horseshoe global-scale prior scale");
  fit_cmd->add_option("--slab-scale", fit_args.slab_scale, "slab scale s");
  add_sampler_flags(fit_cmd, fit_args);

  // tune-prior
  std::string tp_config, tp_from_fit, tp_grid = "0.001,0.01,0.1", tp_out;
  double tp_delta_star = 0.0;
  std::int64_t tp_sims = 1000000;
  std::uint64_t tp_seed = 1;
  bool tp_force = false;
  auto* tune_cmd = app.add_subcommand("tune-prior", "prior-predictive tuning table over tau0");
  tune_cmd->add_option("--config", tp_config, "model config JSON");
  tune_cmd->add_option("--delta-star", tp_delta_star, "shock threshold in years");
  tune_cmd->add_option("--from-fit", tp_from_fit, "derive delta* from a no-shock fit directory");
  tune_cmd->add_option("--grid", tp_grid, "comma-separated tau0 grid");
  tune_cmd->add_option("--sims", tp_sims, "simulations per grid point (>= 1e5)");
  tune_cmd->add_option("--seed", tp_seed, "RNG seed");
  tune_cmd->add_option("--out", tp_out, "output directory for tuning.csv");
  tune_cmd->add_flag("--force", tp_force, "overwrite the output directory");

  // project
  std::string pj_fit, pj_mode = "with-shock", pj_quantiles, pj_out;
  std::string pj_crisis_country, pj_crisis_period;
  double pj_crisis_gamma = 0.0;
  int pj_horizon = 16;
  std::uint64_t pj_seed = 1;
  bool pj_force = false, pj_allow = false;
  auto* project_cmd = app.add_subcommand("project", "probabilistic forward projections");
  project_cmd->add_option("--fit", pj_fit, "fit directory")->required();
  project_cmd->add_option("--horizon", pj_horizon, "future periods (default 16)");
  project_cmd->add_option("--mode", pj_mode, "with-shock | shock-free");
  project_cmd->add_option("--quantiles", pj_quantiles, "comma-separated quantile levels");
  project_cmd->add_option("--seed", pj_seed, "RNG seed");
  project_cmd->add_option("--out", pj_out, "output directory")->required();
  project_cmd->add_flag("--force", pj_force, "overwrite the output directory");
  project_cmd->add_flag("--allow-unconverged", pj_allow, "project despite a failed gate");
  project_cmd->add_option("--crisis-country", pj_crisis_country,
                          "experimental: country for a conditioned crisis");
  project_cmd->add_option("--crisis-period", pj_crisis_period, "experimental: period label");
  project_cmd->add_option("--crisis-gamma", pj_crisis_gamma, "experimental: fixed local scale");

  // detect
  std::string dt_fit, dt_out;
  double dt_delta_star = 0.0, dt_prob = 0.975;
  bool dt_force = false;
  auto* detect_cmd = app.add_subcommand("detect", "historical shock detection");
  detect_cmd->add_option("--fit", dt_fit, "fit directory")->required();
  detect_cmd->add_option("--delta-star", dt_delta_star,
                         "shock threshold (default: 2 x median tau_eps)");
  detect_cmd->add_option("--prob-threshold", dt_prob, "detection probability threshold");
  detect_cmd->add_option("--out", dt_out, "output directory")->required();
  detect_cmd->add_flag("--force", dt_force, "overwrite the output directory");

  // validate
  CommonFitArgs val_args;
  std::string val_cutoff, val_target;
  auto* validate_cmd = app.add_subcommand("validate", "out-of-sample holdout validation");
  validate_cmd->add_option("--data", val_args.data_path, "panel CSV")->required();
  validate_cmd->add_option("--config", val_args.config_path, "model/sampler config JSON");
  validate_cmd->add_option("--cutoff", val_cutoff, "last training period, e.g. 2005-2010")
      ->required();
  validate_cmd->add_option("--target", val_target, "held-out target period, e.g. 2015-2020")
      ->required();
  validate_cmd->add_option("--out", val_args.out_dir, "output directory")->required();
  validate_cmd->add_option("--seed", val_args.seed, "RNG seed");
  validate_cmd->add_flag("--force", val_args.force, "overwrite the output directory");
  add_sampler_flags(validate_cmd, val_args);

  // simulate
  std::string sim_spec, sim_out;
  std::vector<std::string> sim_shocks;
  int sim_countries = 30, sim_periods = 14;
  double sim_tau_eps = 0.8;
  std::uint64_t sim_seed = 1;
  bool sim_demo = false, sim_force = false;
  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic panel with truth");
  simulate_cmd->add_option("--spec", sim_spec, "synthetic spec JSON");
  simulate_cmd->add_flag("--demo", sim_demo, "generate a plausible default spec");
  simulate_cmd->add_option("--countries", sim_countries, "demo: number of countries");
  simulate_cmd->add_option("--periods", sim_periods, "demo: number of periods");
  simulate_cmd->add_option("--tau-eps", sim_tau_eps, "demo: smoothing sd in years");
  simulate_cmd->add_option("--shock", sim_shocks,
                           "inject COUNTRY_INDEX:PERIOD_INDEX:MAGNITUDE (repeatable)");
  simulate_cmd->add_option("--seed", sim_seed, "RNG seed");
  simulate_cmd->add_option("--out", sim_out, "output directory")->required();
  simulate_cmd->add_flag("--force", sim_force, "overwrite the output directory");

  // report
  std::string rp_fit;
  auto* report_cmd = app.add_subcommand("report", "summarize a fit directory");
  report_cmd->add_option("--fit", rp_fit, "fit directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args);
    if (*tune_cmd) {
      return cmd_tune_prior(tp_config, tp_delta_star, tp_from_fit, tp_grid, tp_sims, tp_seed,
                            tp_out, tp_force);
    }
    if (*project_cmd) {
      return cmd_project(pj_fit, pj_horizon, pj_mode, pj_quantiles, pj_seed, pj_allow,
                         pj_crisis_country, pj_crisis_period, pj_crisis_gamma, pj_out, pj_force);
    }
    if (*detect_cmd) return cmd_detect(dt_fit, dt_delta_star, dt_prob, dt_out, dt_force);
    if (*validate_cmd) return cmd_validate(val_args, val_cutoff, val_target);
    if (*simulate_cmd) {
      return cmd_simulate(sim_spec, sim_demo, sim_countries, sim_periods, sim_tau_eps, sim_shocks,
                          sim_seed, sim_out, sim_force);
    }
    if (*report_cmd) return cmd_report(rp_fit);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConvergenceGate& e) {
    std::fprintf(stderr, "convergence gate: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
