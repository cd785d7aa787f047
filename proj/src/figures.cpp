#include "mnpt/figures.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"
#include "mnpt/magnetization.hpp"
#include "mnpt/plan.hpp"
#include "mnpt/scenario.hpp"

namespace mnpt {

namespace {

constexpr double kDeg = 180.0 / kPi;

// Half-angle reconstructions are only defined modulo π.
std::vector<double> unwrap(std::vector<double> x, double period = 2.0 * kPi) {
  const double k = 2.0 * kPi / period;
  for (std::size_t i = 1; i < x.size(); ++i) {
    x[i] = x[i - 1] + wrap_phase(k * (x[i] - x[i - 1])) / k;
  }
  return x;
}

std::string num(double x) { return format_number(x); }

MeasurementChannels noiseless(const FieldConfig& field, const ParticleSpec& p, double T, const ChainConfig& chain,
                              double T_amb) {
  const auto lines = simulate_lines(field, p, T, chain, T_amb);
  return render_channels(lines, chain.acquisition, NoiseModel{}, chain.amplifier.reference_gain());
}

}  // namespace

std::vector<std::string> figure_ids() { return {"fig1", "fig2a", "fig2b", "fig3", "fig4", "fig8", "fig9"}; }

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more (x, y) pairs");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("slope needs distinct x values");
  return sxy / sxx;
}

// ---------------------------------------------------------------- fig1

Fig1Result figure1(const Fig1Params& prm) {
  constexpr std::int64_t f_low = 1570;  // silent second tone, keeps the base period at 10 Hz
  const FieldConfig field(std::int64_t(prm.f_high), f_low, prm.B, 0.0);
  ChainConfig chain;
  chain.acquisition = {500e3, prm.window_periods};
  const auto plan = check_plan(field.f_high_hz(), f_low, chain.acquisition.sample_rate, 0, prm.window_periods).plan;
  const ParticleSpec particle;
  const EstimatorOptions single{EstimatorMode::Single};

  const auto clean = noiseless(field, particle, prm.T, chain, 298.15);
  const auto& amp = chain.amplifier;
  const auto e0 = estimate_temperature(clean, plan, amp, CalibrationModel::from_constant(1.0), single);
  if (!e0.valid) throw EstimationError("fig1 calibration failed: " + e0.reason);
  const auto cal = calibrate({{e0.tau_est, prm.T}}, CalibrationModel::Kind::OnePoint);

  const double line_amp = std::abs(line_phasors(clean, field.f_high()).difference());
  const double N = double(clean.diff_sample.size());
  const double dT_dphi = 2.0 * prm.T / std::sin(2.0 * e0.phi_H);

  Fig1Result r;
  const std::size_t trials = std::size_t(prm.trials);
  for (std::size_t s = 0; s < prm.snr_db.size(); ++s) {
    const double sigma = noise_sigma(clean.sample_peak, prm.snr_db[s]);
    std::vector<double> err(trials, TemperatureEstimate::kNaN);
    parallel_for(trials, prm.threads, [&](std::size_t j) {
      const auto ch = with_noise(clean, sigma, sigma / amp.reference_gain(), true,
                                 derive_seed(prm.seed, s * trials + j));
      const auto e = estimate_temperature(ch, plan, amp, cal, single);
      if (e.valid) err[j] = e.T_est - prm.T;
    });
    Fig1Point pt{prm.snr_db[s], std::pow(10.0, prm.snr_db[s] / 20.0), 0.0, 0.0, 0.0, 0};
    double sum = 0.0;
    for (double e : err) {
      if (std::isfinite(e)) {
        sum += e;
        ++pt.n_valid;
      }
    }
    pt.mean_error = pt.n_valid ? sum / double(pt.n_valid) : TemperatureEstimate::kNaN;
    double ss = 0.0;
    for (double e : err) {
      if (std::isfinite(e)) ss += (e - pt.mean_error) * (e - pt.mean_error);
    }
    pt.std_error = pt.n_valid > 1 ? std::sqrt(ss / double(pt.n_valid - 1)) : TemperatureEstimate::kNaN;
    pt.predicted_std = 2.0 * sigma / (line_amp * std::sqrt(N)) * dT_dphi;
    r.points.push_back(pt);
  }
  std::vector<double> lx, ly;
  for (const auto& pt : r.points) {
    if (pt.std_error > 0.0) {
      lx.push_back(std::log10(pt.snr_amplitude));
      ly.push_back(std::log10(pt.std_error));
    }
  }
  r.loglog_slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : TemperatureEstimate::kNaN;
  return r;
}

CsvTable to_table(const Fig1Result& r) {
  CsvTable t;
  t.add_meta("figure", "fig1");
  t.columns = {"snr_db", "snr_amplitude", "error_std_K", "error_mean_K", "predicted_std_K", "n_valid"};
  for (const auto& p : r.points) {
    t.rows.push_back({num(p.snr_db), num(p.snr_amplitude), num(p.std_error), num(p.mean_error),
                      num(p.predicted_std), std::to_string(p.n_valid)});
  }
  t.trailer.push_back("summary: loglog_slope=" + num(r.loglog_slope));
  return t;
}

// ---------------------------------------------------------------- fig2

CsvTable figure2a() {
  const ParticleSpec p;
  constexpr double T = 300.0;
  constexpr double B = 1.5e-3;
  const FieldConfig field(1000, 10, B, 0.0);
  const auto h = fourier_coefficients(field, p, T, 3 * field.n_high());
  const double c1 = std::abs(h.coefficient(field.n_high()));
  const double c3 = std::abs(h.coefficient(3 * field.n_high()));
  const double tau = tau_particle(p, T);

  CsvTable t;
  t.add_meta("figure", "fig2a");
  t.add_meta("tau_s", tau);
  t.add_meta("B_mT", B * 1e3);
  t.columns = {"frequency_hz", "omega_tau", "attenuation", "phase_rad", "m1_amplitude_A_m", "m3_amplitude_A_m"};
  for (int k = 0; k <= 30; ++k) {
    const double f = 100.0 * std::pow(10.0, k / 10.0);
    const auto r1 = debye_response(kTwoPi * f, tau);
    const auto r3 = debye_response(kTwoPi * 3.0 * f, tau);
    t.rows.push_back({num(f), num(kTwoPi * f * tau), num(r1.attenuation), num(r1.phase), num(c1 * r1.attenuation),
                      num(c3 * r3.attenuation)});
  }
  return t;
}

CsvTable figure2b() {
  const ParticleSpec p;
  constexpr double T = 300.0;
  const double tau0 = tau_particle(p, T);
  const auto model = FieldCorrectionModel::empirical();
  const double xi_per_tesla = xi_parameter(p, 1.0, T);

  CsvTable t;
  t.add_meta("figure", "fig2b");
  t.add_meta("field_correction", "empirical c=0.126 p=1.72");
  t.columns = {"xi", "B_mT", "tau_s", "tau_ratio"};
  for (int k = 0; k <= 40; ++k) {
    const double xi = 0.25 * k;
    const double tau = tau_field_corrected(tau0, xi, model);
    t.rows.push_back({num(xi), num(xi / xi_per_tesla * 1e3), num(tau), num(tau / tau0)});
  }
  return t;
}

// ---------------------------------------------------------------- fig3

Fig3Result figure3(const Fig3Params& prm) {
  std::vector<double> temps = prm.temperatures;
  if (temps.empty()) {
    for (int k = 0; k <= 20; ++k) temps.push_back(310.0 + 0.5 * k);
  }
  const FieldConfig field(6000, 1500, 0.36e-3, 1.98e-3);
  ChainConfig chain;
  chain.acquisition = {600e3, prm.window_periods};
  chain.fill_factor = prm.fill_factor;
  chain.background_ambient = prm.ambient_baseline;
  const auto plan = check_plan(6000, 1500, chain.acquisition.sample_rate, 0, prm.window_periods).plan;
  const ParticleSpec particle;
  const auto& amp = chain.amplifier;
  const EstimatorOptions mixing{EstimatorMode::Mixing};
  const EstimatorOptions single{EstimatorMode::Single};

  std::vector<double> cal_T = {temps.front()};
  if (prm.calibration == CalibrationModel::Kind::AffineInInverseTau) {
    cal_T = {temps.front(), 0.5 * (temps.front() + temps.back()), temps.back()};
  }
  std::vector<CalibrationPoint> pm, ps;
  for (double T : cal_T) {
    const auto ch = noiseless(field, particle, T, chain, prm.ambient_baseline);
    const auto unit = CalibrationModel::from_constant(1.0);
    const auto em = estimate_temperature(ch, plan, amp, unit, mixing);
    const auto es = estimate_temperature(ch, plan, amp, unit, single);
    if (!em.valid || !es.valid) throw EstimationError("fig3 calibration failed: " + em.reason + es.reason);
    pm.push_back({em.tau_est, T});
    ps.push_back({es.tau_est, T});
  }
  const auto cal_m = calibrate(pm, prm.calibration);
  const auto cal_s = calibrate(ps, prm.calibration);

  Fig3Result r;
  r.rows.resize(temps.size());
  parallel_for(temps.size(), 0, [&](std::size_t i) {
    const double T = temps[i];
    const double T_amb = prm.ambient_baseline + prm.ambient_coupling * (T - temps.front());
    const auto ch = noiseless(field, particle, T, chain, T_amb);
    const auto em = estimate_temperature(ch, plan, amp, cal_m, mixing);
    const auto es = estimate_temperature(ch, plan, amp, cal_s, single);
    const double direct = -sample_phase(ch, amp, field, MixingLine::high(), 0.0, ReferenceMode::None);
    r.rows[i] = {T, T_amb, direct, es.phi_H, em.phi_H, es.T_est - T, em.T_est - T};
  });
  for (const auto& row : r.rows) {
    r.max_error_single = std::max(r.max_error_single, std::abs(row.error_single));
    r.max_error_mixing = std::max(r.max_error_mixing, std::abs(row.error_mixing));
  }
  return r;
}

CsvTable to_table(const Fig3Result& r) {
  CsvTable t;
  t.add_meta("figure", "fig3");
  t.columns = {"T_true_K",      "T_amb_K",          "phi_H_direct_rad", "phi_H_single_rad",
               "phi_H_mixing_rad", "error_single_K", "error_mixing_K"};
  for (const auto& x : r.rows) {
    t.rows.push_back({num(x.T_true), num(x.T_amb), num(x.phi_direct), num(x.phi_single), num(x.phi_mixing),
                      num(x.error_single), num(x.error_mixing)});
  }
  t.trailer.push_back("summary: max_abs_error_single_K=" + num(r.max_error_single) +
                      " max_abs_error_mixing_K=" + num(r.max_error_mixing) +
                      " paper_single_K=0.56 paper_mixing_K=0.08");
  return t;
}

// ---------------------------------------------------------------- fig4

CsvTable figure4() {
  constexpr double T = 300.0;
  CsvTable t;
  t.add_meta("figure", "fig4");
  t.add_meta("T_K", T);
  t.add_meta("tau0_s", ParticleSpec{}.tau0);
  t.columns = {"d_core_nm", "coating_nm", "d_hydro_nm", "K_J_m3", "tau_N_s", "tau_N_saturated", "tau_B_s",
               "tau_eff_s"};
  for (double K : {10e3, 20e3, 30e3}) {
    for (double coating : {0.0, 4.0, 10.0}) {
      for (int d = 5; d <= 50; ++d) {
        ParticleSpec base;
        base.K_aniso = K;
        const auto p = ParticleSpec::with_coating(d * 1e-9, coating * 1e-9, base);
        const auto tn = tau_neel(p.d_core, p.K_aniso, T, p.tau0);
        const double tb = tau_brownian(p.d_hydro, p.eta, T);
        t.rows.push_back({num(d), num(coating), num(p.d_hydro * 1e9), num(K), num(tn.seconds),
                          tn.saturated ? "1" : "0", num(tb), num(tau_effective(tb, tn))});
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------- fig8

Fig8Result figure8(const Fig8Params& prm) {
  const ParticleSpec p;
  Fig8Result r;
  for (double ratio : prm.ratios) {
    const FieldConfig field(6000, 1570, prm.B_high, ratio * prm.B_high);
    const int n_top = int(prm.max_frequency / field.f_base());
    const auto h = fourier_coefficients(field, p, prm.T, n_top);
    const auto lines = debye_filtered_lines(h, tau_particle(p, prm.T));
    double peak = 0.0;
    for (std::size_t n = 1; n < lines.size(); ++n) peak = std::max(peak, std::abs(lines.lines[n]));
    const auto db = [&](double a) { return a > 0.0 ? 20.0 * std::log10(a / peak) : -HUGE_VAL; };

    std::set<int> seen;
    for (int nh = 0; nh <= 3; ++nh) {
      for (int nl = -9; nl <= 9; ++nl) {
        const MixingLine ml{nh, nl};
        const int n = ml.harmonic(field);
        if (n <= 0 || n > n_top || !seen.insert(n).second) continue;
        const double a = std::abs(lines.at(std::size_t(n)));
        r.lines.push_back({ratio, nh, nl, ml.frequency(field), a, db(a)});
      }
    }
    const auto amp_of = [&](MixingLine ml) { return std::abs(lines.at(std::size_t(ml.harmonic(field)))); };
    const double aH = amp_of(MixingLine::high());
    r.summary.push_back({ratio, amp_of(MixingLine::plus()) / aH, amp_of(MixingLine::minus()) / aH,
                         std::max(db(amp_of({1, 1})), db(amp_of({1, -1})))});
  }
  std::sort(r.lines.begin(), r.lines.end(), [](const Fig8Line& a, const Fig8Line& b) {
    return a.ratio != b.ratio ? a.ratio < b.ratio : a.frequency < b.frequency;
  });
  return r;
}

CsvTable to_table(const Fig8Result& r) {
  CsvTable t;
  t.add_meta("figure", "fig8");
  t.columns = {"ratio", "n_high", "n_low", "frequency_hz", "amplitude_A_m", "normalized_db"};
  for (const auto& l : r.lines) {
    t.rows.push_back({num(l.ratio), std::to_string(l.n_high), std::to_string(l.n_low), num(l.frequency),
                      num(l.amplitude), num(l.normalized_db)});
  }
  for (const auto& s : r.summary) {
    t.trailer.push_back("summary: ratio=" + num(s.ratio) + " plus_over_high=" + num(s.plus_over_high) +
                        " minus_over_high=" + num(s.minus_over_high) + " max_even_db=" + num(s.max_even_db));
  }
  return t;
}

// ---------------------------------------------------------------- fig9

Fig9Result figure9(const Fig9Params& prm) {
  std::vector<double> ambient = prm.ambient;
  if (ambient.empty()) {
    for (int k = 0; k <= 10; ++k) ambient.push_back(293.15 + k);
  }
  const FieldConfig field;
  ChainConfig chain;
  chain.acquisition.window_periods = prm.window_periods;
  const ParticleSpec particle;
  const auto& amp = chain.amplifier;

  Fig9Result r;
  r.rows.resize(ambient.size());
  parallel_for(ambient.size(), 0, [&](std::size_t i) {
    const auto ch = noiseless(field, particle, prm.T_sample, chain, ambient[i]);
    const auto voltage = [](double x) { return wrap_phase(-x - 1.5 * kPi); };
    const auto pair = [&](ReferenceMode m) {
      return std::pair{voltage(sample_phase(ch, amp, field, MixingLine::plus(), 0.0, m)),
                       voltage(sample_phase(ch, amp, field, MixingLine::minus(), 0.0, m))};
    };
    const auto [pp, pm] = pair(ReferenceMode::Fundamental);
    const auto [np, nm] = pair(ReferenceMode::None);
    const auto [sp, sm] = pair(ReferenceMode::SameLine);
    Fig9Row& row = r.rows[i];
    row.T_amb = ambient[i];
    row.phi_plus = pp;
    row.phi_minus = pm;
    row.phi_direct = wrap_phase(-sample_phase(ch, amp, field, MixingLine::high(), 0.0, ReferenceMode::None));
    row.phi_mixing_ref = mixing_half_angle(pp, pm);
    row.phi_mixing_noref = mixing_half_angle(np, nm);
    row.phi_same_line = mixing_half_angle(sp, sm);
  });

  std::vector<double> x, direct, ref, noref, same;
  for (const auto& row : r.rows) {
    x.push_back(row.T_amb);
    direct.push_back(row.phi_direct);
    ref.push_back(row.phi_mixing_ref);
    noref.push_back(row.phi_mixing_noref);
    same.push_back(row.phi_same_line);
  }
  r.slope_direct = least_squares_slope(x, unwrap(direct)) * kDeg;
  r.slope_mixing_ref = least_squares_slope(x, unwrap(ref, kPi)) * kDeg;
  r.slope_mixing_noref = least_squares_slope(x, unwrap(noref, kPi)) * kDeg;
  r.slope_same_line = least_squares_slope(x, unwrap(same, kPi)) * kDeg;
  return r;
}

CsvTable to_table(const Fig9Result& r) {
  CsvTable t;
  t.add_meta("figure", "fig9");
  t.columns = {"T_amb_K",          "phi_plus_rad",           "phi_minus_rad",       "phi_H_direct_rad",
               "phi_H_mixing_ref_rad", "phi_H_mixing_noref_rad", "phi_H_same_line_rad"};
  for (const auto& x : r.rows) {
    t.rows.push_back({num(x.T_amb), num(x.phi_plus), num(x.phi_minus), num(x.phi_direct), num(x.phi_mixing_ref),
                      num(x.phi_mixing_noref), num(x.phi_same_line)});
  }
  t.trailer.push_back("summary: slope_direct_deg_per_K=" + num(r.slope_direct) +
                      " slope_mixing_ref_deg_per_K=" + num(r.slope_mixing_ref) +
                      " slope_mixing_noref_deg_per_K=" + num(r.slope_mixing_noref) +
                      " slope_same_line_deg_per_K=" + num(r.slope_same_line) +
                      " paper_direct_deg_per_K=0.57 paper_mixing_deg_per_K=0.05");
  return t;
}

// ---------------------------------------------------------------- dispatch

CsvTable generate_figure(const std::string& id, const FigureOptions& opts) {
  if (id == "fig1") {
    Fig1Params p;
    p.seed = opts.seed;
    p.trials = opts.trials;
    p.threads = opts.threads;
    return to_table(figure1(p));
  }
  if (id == "fig2a") return figure2a();
  if (id == "fig2b") return figure2b();
  if (id == "fig3") return to_table(figure3());
  if (id == "fig4") return figure4();
  if (id == "fig8") return to_table(figure8());
  if (id == "fig9") return to_table(figure9());
  std::string known;
  for (const auto& f : figure_ids()) known += (known.empty() ? "" : "|") + f;
  throw ConfigError("unknown figure id '" + id + "' (" + known + ")");
}

}  // namespace mnpt
