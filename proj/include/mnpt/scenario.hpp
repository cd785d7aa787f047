#pragma once

// Configuration-driven experiment runner: temperature programs, coil ambient
// model, calibration against simulated reference points, Monte Carlo trials
// and CSV records.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mnpt/csv.hpp"
#include "mnpt/estimator.hpp"
#include "mnpt/field.hpp"
#include "mnpt/physics.hpp"
#include "mnpt/plan.hpp"
#include "mnpt/signal_chain.hpp"

namespace mnpt {

/// Sample temperature over time: constant, or an exponential approach from
/// T_start to T_end that reaches T_end exactly at `duration`.
struct TemperatureProgram {
  enum class Kind { Constant, Cooling };

  Kind kind = Kind::Constant;
  double T_start = 315.6;        // K; the constant value for Kind::Constant
  double T_end = 315.6;          // K
  double duration = 120.0;       // s
  double time_constant = 60.0;   // s
  double cadence = 1.0;          // estimates per second

  double at(double t) const;
  /// t_i = i/cadence for i = 0 .. round(duration·cadence) − 1 (at least one point).
  std::vector<double> times() const;
  void validate() const;
};

/// Coil ambient temperature: baseline + coupling·(T_sample − T_sample(0)) + drift·t.
struct AmbientProgram {
  double baseline = 298.15;  // K
  double coupling = 0.0;     // K of coil per K of sample
  double drift = 0.0;        // K/s

  double at(double t, double T_sample, double T_sample0) const {
    return baseline + coupling * (T_sample - T_sample0) + drift * t;
  }
};

struct CalibrationSpec {
  CalibrationModel::Kind kind = CalibrationModel::Kind::OnePoint;
  std::vector<double> temperatures{315.6};  // K, simulated noiseless at the baseline ambient
};

struct ScenarioConfig {
  ParticleSpec particle;
  FieldConfig field;
  std::int64_t mains = 50;
  ChainConfig chain;
  std::string amplifier_table;   // empty: built-in placeholder
  bool fixed_background = true;  // background recorded once, at the baseline ambient
  TemperatureProgram temperature;
  AmbientProgram ambient;
  CalibrationSpec calibration;
  EstimatorOptions estimator;
  int trials = 1;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string output;

  FrequencyPlan plan() const;
  void validate() const;
};

/// INI-style text: [section] headers, key = value, '#' or ';' comments.
/// Relative file paths are resolved against `base_dir`.
ScenarioConfig parse_scenario(std::istream& in, const std::string& base_dir = ".");
ScenarioConfig load_scenario(const std::string& path);
/// Writes every key in the same schema, readable by parse_scenario.
void write_scenario(std::ostream& os, const ScenarioConfig& cfg);

struct Record {
  double t = 0.0;
  int trial = 0;
  double T_true = 0.0;
  double T_amb = 0.0;
  double T_est = TemperatureEstimate::kNaN;
  double tau_est = TemperatureEstimate::kNaN;
  double phi_H = TemperatureEstimate::kNaN;
  double phi_plus = TemperatureEstimate::kNaN;
  double phi_minus = TemperatureEstimate::kNaN;
  double error = TemperatureEstimate::kNaN;  // T_est − T_true
  bool valid = false;
  std::string reason;
};

struct Summary {
  std::size_t n = 0;
  std::size_t n_valid = 0;
  double max_abs_error = TemperatureEstimate::kNaN;
  double mean_error = TemperatureEstimate::kNaN;
  double std_error = TemperatureEstimate::kNaN;  // sample standard deviation
};

Summary summarize(const std::vector<Record>& records);

struct ExperimentResult {
  std::vector<std::string> metadata;  // key=value
  CalibrationModel calibration;
  std::vector<Record> records;

  Summary summary() const { return summarize(records); }
};

/// Calibration by noiseless simulation at the configured reference temperatures.
CalibrationModel calibrate_scenario(const ScenarioConfig& cfg);

ExperimentResult run_scenario(const ScenarioConfig& cfg);

CsvTable to_table(const ExperimentResult& r);
/// Inverse of to_table for the record columns.
std::vector<Record> records_from_table(const CsvTable& t);
std::string summary_line(const Summary& s);
void emit_csv(const ExperimentResult& r, const std::string& path);

struct SnrMatch {
  double snr_db = 0.0;        // frozen value
  double std_error = 0.0;     // achieved at snr_db
  std::vector<std::pair<double, double>> steps;  // (snr_db, std) per iteration
};

/// Adjusts snr_db by 20·log10(std/target) until the scenario's error standard
/// deviation lands within `rel_tol` of `target_std` or `max_iter` is reached.
SnrMatch match_snr(ScenarioConfig cfg, double target_std, double start_snr_db, int max_iter = 6,
                   double rel_tol = 0.02);

/// Channel CSV: t_s,diff_background_V,diff_sample_V,ref_A_V with sample rate,
/// base frequency and noise level in the preamble.
CsvTable channels_to_table(const MeasurementChannels& ch);
MeasurementChannels channels_from_table(const CsvTable& t);

/// Runs fn(i) for i in [0, n) on `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace mnpt
