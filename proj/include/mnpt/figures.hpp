#pragma once

// Tabular reproductions of the simulation figures. Each generator returns
// structured rows; to_table() renders them as CSV with a summary trailer.

#include <cstdint>
#include <string>
#include <vector>

#include "mnpt/csv.hpp"
#include "mnpt/estimator.hpp"
#include "mnpt/physics.hpp"
#include "mnpt/signal_chain.hpp"

namespace mnpt {

std::vector<std::string> figure_ids();

struct FigureOptions {
  std::uint64_t seed = 1;
  int trials = 200;
  int threads = 0;
};

/// Dispatches on id; throws ConfigError for an unknown id.
CsvTable generate_figure(const std::string& id, const FigureOptions& opts = {});

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- error against SNR, single tone -------------------------------------

struct Fig1Params {
  std::vector<double> snr_db{20, 25, 30, 35, 40, 45, 50, 55, 60};
  double T = 300.0;
  double f_high = 5000.0;
  double B = 1.5e-3;
  int window_periods = 1;
  int trials = 200;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct Fig1Point {
  double snr_db;
  double snr_amplitude;  // 10^(snr_db/20)
  double std_error;      // K
  double mean_error;     // K
  double predicted_std;  // K, first-order phase-noise propagation
  std::size_t n_valid;
};

struct Fig1Result {
  std::vector<Fig1Point> points;
  double loglog_slope = 0.0;  // d log(std) / d log(snr_amplitude)
};

Fig1Result figure1(const Fig1Params& p = {});
CsvTable to_table(const Fig1Result& r);

// ---- response against frequency and relaxation against field -----------

CsvTable figure2a();
CsvTable figure2b();

// ---- mixing against single frequency under coil drift --------------------

struct Fig3Params {
  std::vector<double> temperatures;  // empty: 310 … 320 K in 0.5 K steps
  double ambient_baseline = 298.15;
  double ambient_coupling = 0.0025;  // K of coil per K of sample
  double fill_factor = 0.1;
  int window_periods = 10;
  CalibrationModel::Kind calibration = CalibrationModel::Kind::AffineInInverseTau;
};

struct Fig3Row {
  double T_true;
  double T_amb;
  double phi_direct;     // rad, f_H phase without reference correction
  double phi_single;     // rad, f_H phase with reference correction
  double phi_mixing;     // rad, reconstructed from the mixing lines
  double error_single;   // K
  double error_mixing;   // K
};

struct Fig3Result {
  std::vector<Fig3Row> rows;
  double max_error_single = 0.0;
  double max_error_mixing = 0.0;
};

Fig3Result figure3(const Fig3Params& p = {});
CsvTable to_table(const Fig3Result& r);

// ---- relaxation times against diameter -----------------------------------

CsvTable figure4();

// ---- spectrum against field ratio ----------------------------------------

struct Fig8Params {
  std::vector<double> ratios{1.0, 2.0, 3.0, 4.0, 5.5, 8.0};
  double B_high = 0.36e-3;
  double T = 300.0;
  double max_frequency = 25e3;
};

struct Fig8Line {
  double ratio;
  int n_high;
  int n_low;
  double frequency;
  double amplitude;      // A/m
  double normalized_db;  // relative to the largest line of the same spectrum
};

struct Fig8Summary {
  double ratio;
  double plus_over_high;   // |a(f_H + 2f_L)| / |a(f_H)|
  double minus_over_high;  // |a(f_H − 2f_L)| / |a(f_H)|
  double max_even_db;      // largest of f_H ± f_L, normalized
};

struct Fig8Result {
  std::vector<Fig8Line> lines;
  std::vector<Fig8Summary> summary;
};

Fig8Result figure8(const Fig8Params& p = {});
CsvTable to_table(const Fig8Result& r);

// ---- phase drift against coil ambient ------------------------------------

struct Fig9Params {
  double T_sample = 315.0;
  std::vector<double> ambient;  // empty: 293.15 … 303.15 K in 1 K steps
  int window_periods = 10;
};

struct Fig9Row {
  double T_amb;
  double phi_plus;            // voltage-phase convention, reference corrected
  double phi_minus;
  double phi_direct;          // f_H, no reference correction
  double phi_mixing_ref;      // reconstructed, reference corrected
  double phi_mixing_noref;    // reconstructed, no reference correction
  double phi_same_line;       // reconstructed, reference taken at the mixing line itself
};

struct Fig9Result {
  std::vector<Fig9Row> rows;
  // slopes in degrees per kelvin of ambient
  double slope_direct = 0.0;
  double slope_mixing_ref = 0.0;
  double slope_mixing_noref = 0.0;
  double slope_same_line = 0.0;
};

Fig9Result figure9(const Fig9Params& p = {});
CsvTable to_table(const Fig9Result& r);

}  // namespace mnpt
