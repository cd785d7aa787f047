// Command-line front end. Every subcommand writes CSV to --out or stdout.
// Failures print "error: category=<name> message=<text>" on stderr and exit
// with the category's code (usage errors exit 2).

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mnpt/csv.hpp"
#include "mnpt/error.hpp"
#include "mnpt/estimator.hpp"
#include "mnpt/figures.hpp"
#include "mnpt/plan.hpp"
#include "mnpt/scenario.hpp"

namespace {

using namespace mnpt;

int fail(std::string_view category, const std::string& message, int code) {
  std::cerr << "error: category=" << category << " message=" << message << "\n";
  return code;
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> trials;
  std::optional<std::string> mode;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c, bool with_trials, bool with_mode) {
  cmd->add_option("--seed", c.seed, "Master random seed");
  cmd->add_option("--out", c.out, "Output CSV path (default: stdout)");
  if (with_trials) cmd->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  if (with_mode) cmd->add_option("--mode", c.mode, "Estimator mode")->check(CLI::IsMember({"mixing", "single"}));
  cmd->add_option("--threads", c.threads, "Worker threads (0: all cores)");
}

void apply(const Common& c, ScenarioConfig& cfg) {
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (c.mode) cfg.estimator.mode = parse_estimator_mode(*c.mode);
  if (c.threads) cfg.threads = *c.threads;
}

ScenarioConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    ScenarioConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_scenario(path);
}

std::string out_path(const Common& c, const ScenarioConfig& cfg) { return c.out.empty() ? cfg.output : c.out; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic nanoparticle thermometry under mixing-frequency excitation"};
  app.require_subcommand(1);

  // plan-freq
  auto* plan_cmd = app.add_subcommand("plan-freq", "Validate an excitation frequency pair");
  std::int64_t f_high = 6000, f_low = 1570, mains = 50;
  double sample_rate = 500e3;
  int window = 10;
  std::string plan_out;
  plan_cmd->add_option("--f-high", f_high, "High excitation frequency, Hz")->capture_default_str();
  plan_cmd->add_option("--f-low", f_low, "Low excitation frequency, Hz")->capture_default_str();
  plan_cmd->add_option("--sample-rate", sample_rate, "Sample rate, Hz")->capture_default_str();
  plan_cmd->add_option("--mains", mains, "Mains frequency, Hz (0 disables the rule)")->capture_default_str();
  plan_cmd->add_option("--window", window, "Analysis window, base periods")->capture_default_str();
  plan_cmd->add_option("--out", plan_out, "Output CSV path (default: stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the three measurement channels");
  Common sim;
  std::string sim_config;
  std::optional<double> sim_T, sim_amb, sim_snr;
  add_common(sim_cmd, sim, false, false);
  sim_cmd->add_option("--config", sim_config, "Scenario config (default: built-in nominal setup)");
  sim_cmd->add_option("--T", sim_T, "Sample temperature, K (default: program start)");
  sim_cmd->add_option("--ambient", sim_amb, "Coil ambient temperature, K (default: baseline)");
  sim_cmd->add_option("--snr", sim_snr, "SNR in dB (default: config; inf = noiseless)");

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "Estimate temperature from a channel CSV");
  Common est;
  std::string est_in, est_config, est_reference;
  std::optional<double> est_A, est_B;
  add_common(est_cmd, est, false, true);
  est_cmd->add_option("--in", est_in, "Channel CSV written by 'simulate'")->required();
  est_cmd->add_option("--config", est_config, "Scenario config supplying plan, amplifier and calibration");
  est_cmd->add_option("--reference", est_reference, "Reference mode")
      ->check(CLI::IsMember({"fundamental", "same_line", "none"}));
  est_cmd->add_option("--A", est_A, "Calibration constant A, K·s (skips simulated calibration)");
  est_cmd->add_option("--B", est_B, "Affine offset B, K (with --A)");

  // scenario
  auto* scen_cmd = app.add_subcommand("scenario", "Run configured experiments");
  scen_cmd->require_subcommand(1);
  auto* run_cmd = scen_cmd->add_subcommand("run", "Run a scenario config");
  Common run;
  std::string run_config;
  add_common(run_cmd, run, true, true);
  run_cmd->add_option("config", run_config, "Scenario config file")->required();

  auto* match_cmd = scen_cmd->add_subcommand("match-snr", "Find the SNR giving a target error spread");
  Common match;
  std::string match_config;
  double target = 0.0267, start = 40.0;
  add_common(match_cmd, match, true, true);
  match_cmd->add_option("config", match_config, "Scenario config file")->required();
  match_cmd->add_option("--target", target, "Target error standard deviation, K")->capture_default_str();
  match_cmd->add_option("--start", start, "Starting SNR, dB")->capture_default_str();

  // figure
  auto* fig_cmd = app.add_subcommand("figure", "Generate the data behind a figure");
  Common fig;
  std::string fig_id;
  add_common(fig_cmd, fig, true, false);
  fig_cmd->add_option("id", fig_id, "Figure id")->required()->check(CLI::IsMember(figure_ids()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*plan_cmd) {
      const auto r = check_plan(f_high, f_low, sample_rate, mains, window);
      CsvTable t;
      t.columns = {"f_high_hz", "f_low_hz", "f_plus_hz", "f_minus_hz", "f_base_hz", "sample_rate_hz",
                   "window_periods", "valid", "violations"};
      std::string v;
      for (const auto& x : r.violations) v += (v.empty() ? "" : ";") + to_string(x);
      t.rows.push_back({std::to_string(r.plan.f_high), std::to_string(r.plan.f_low), std::to_string(r.plan.f_plus),
                        std::to_string(r.plan.f_minus), std::to_string(r.plan.f_base),
                        format_number(r.plan.sample_rate), std::to_string(r.plan.window_periods),
                        r.valid() ? "1" : "0", v});
      write_csv(plan_out, t);
      if (!r.valid()) throw ConfigError("frequency plan rejected: " + r.describe());
      return 0;
    }

    if (*sim_cmd) {
      auto cfg = config_or_default(sim_config);
      apply(sim, cfg);
      if (sim_snr) cfg.chain.noise.snr_db = *sim_snr;
      cfg.chain.noise.seed = cfg.seed;
      if (cfg.fixed_background) cfg.chain.background_ambient = cfg.ambient.baseline;
      const double T = sim_T.value_or(cfg.temperature.at(0.0));
      const double T_amb = sim_amb.value_or(cfg.ambient.baseline);
      const auto ch = simulate_channels(cfg.field, cfg.particle, T, cfg.chain, T_amb);
      auto t = channels_to_table(ch);
      t.add_meta("T_sample_K", T);
      t.add_meta("T_amb_K", T_amb);
      t.add_meta("f_high_hz", cfg.field.f_high());
      t.add_meta("f_low_hz", cfg.field.f_low());
      t.add_meta("seed", std::to_string(cfg.seed));
      write_csv(out_path(sim, cfg), t);
      return 0;
    }

    if (*est_cmd) {
      auto cfg = config_or_default(est_config);
      apply(est, cfg);
      if (!est_reference.empty()) cfg.estimator.reference = parse_reference_mode(est_reference);
      const auto ch = channels_from_table(read_csv(est_in));
      CalibrationModel cal;
      if (est_A) {
        cal = CalibrationModel::from_constant(*est_A);
        if (est_B) {
          cal.kind = CalibrationModel::Kind::AffineInInverseTau;
          cal.B = *est_B;
        }
      } else {
        cal = calibrate_scenario(cfg);
      }
      const auto e = estimate_temperature(ch, cfg.plan(), cfg.chain.amplifier, cal, cfg.estimator);
      CsvTable t;
      t.add_meta("mode", to_string(cfg.estimator.mode));
      t.add_meta("reference", to_string(cfg.estimator.reference));
      t.add_meta("calibration_A_Ks", cal.A);
      t.add_meta("calibration_B_K", cal.B);
      t.columns = {"T_est_K", "tau_est_s", "phi_H_rad", "phi_plus_rad", "phi_minus_rad", "valid", "reason"};
      std::string reason = e.reason;
      std::replace(reason.begin(), reason.end(), ',', ';');
      t.rows.push_back({format_number(e.T_est), format_number(e.tau_est), format_number(e.phi_H),
                        format_number(e.phi_plus), format_number(e.phi_minus), e.valid ? "1" : "0", reason});
      for (const auto& l : e.lines) {
        t.trailer.push_back("line: frequency_hz=" + format_number(l.frequency) +
                            " amplitude_V=" + format_number(l.amplitude) + " snr_db=" + format_number(l.snr_db) +
                            " phase_rad=" + format_number(l.phase));
      }
      write_csv(out_path(est, cfg), t);
      if (!e.valid) throw EstimationError(e.reason);
      return 0;
    }

    if (*run_cmd) {
      auto cfg = load_scenario(run_config);
      apply(run, cfg);
      const auto r = run_scenario(cfg);
      emit_csv(r, out_path(run, cfg));
      return 0;
    }

    if (*match_cmd) {
      auto cfg = load_scenario(match_config);
      apply(match, cfg);
      const auto m = match_snr(cfg, target, start);
      CsvTable t;
      t.add_meta("target_std_K", target);
      t.columns = {"iteration", "snr_db", "std_error_K"};
      for (std::size_t i = 0; i < m.steps.size(); ++i) {
        t.rows.push_back({std::to_string(i), format_number(m.steps[i].first), format_number(m.steps[i].second)});
      }
      t.trailer.push_back("summary: snr_db=" + format_number(m.snr_db) + " std_error_K=" + format_number(m.std_error));
      write_csv(match.out, t);
      return 0;
    }

    if (*fig_cmd) {
      FigureOptions opts;
      if (fig.seed) opts.seed = *fig.seed;
      if (fig.trials) opts.trials = *fig.trials;
      if (fig.threads) opts.threads = *fig.threads;
      write_csv(fig.out, generate_figure(fig_id, opts));
      return 0;
    }
  } catch (const Error& e) {
    return fail(to_string(e.category()), e.what(), exit_code(e.category()));
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
