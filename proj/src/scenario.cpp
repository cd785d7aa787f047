#include "mnpt/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mnpt/error.hpp"

namespace mnpt {

// ---------------------------------------------------------------- programs

double TemperatureProgram::at(double t) const {
  if (kind == Kind::Constant) return T_start;
  const double D = duration;
  const double tc = time_constant;
  const double shape = (std::exp(-t / tc) - std::exp(-D / tc)) / (1.0 - std::exp(-D / tc));
  return T_end + (T_start - T_end) * shape;
}

std::vector<double> TemperatureProgram::times() const {
  const auto n = std::max<long>(1, std::lround(duration * cadence));
  std::vector<double> t(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) t[std::size_t(i)] = double(i) / cadence;
  return t;
}

void TemperatureProgram::validate() const {
  if (!(T_start > 0.0) || !(T_end > 0.0)) throw ConfigError("temperature program needs T > 0");
  if (!(duration > 0.0) || !(cadence > 0.0)) throw ConfigError("temperature program needs duration, cadence > 0");
  if (kind == Kind::Cooling && !(time_constant > 0.0)) throw ConfigError("cooling time constant must be > 0");
}

FrequencyPlan ScenarioConfig::plan() const {
  return plan_frequencies(field.f_high_hz(), field.f_low_hz(), chain.acquisition.sample_rate, mains,
                          chain.acquisition.window_periods);
}

void ScenarioConfig::validate() const {
  particle.validate();
  temperature.validate();
  (void)plan();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(ambient.baseline > 0.0)) throw ConfigError("ambient baseline must be > 0");
  if (calibration.temperatures.empty()) throw ConfigError("calibration needs at least one temperature");
  if (!(chain.fill_factor > 0.0)) throw ConfigError("fill factor must be > 0");
}

// ---------------------------------------------------------------- config text

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"particle", {"d_core_nm", "d_hydro_nm", "K_aniso_J_m3", "Ms_A_m", "moment_A_m2", "N_conc_m3", "eta_Pa_s",
                    "tau0_s"}},
      {"distribution", {"kind", "median_d_nm", "sigma_log", "n_quadrature"}},
      {"field", {"f_high_hz", "f_low_hz", "B_high_mT", "B_low_mT", "phase_high_rad", "phase_low_rad", "mains_hz"}},
      {"acquisition", {"sample_rate_hz", "window_periods"}},
      {"coil_a", {"R0_ohm", "L0_H", "alpha_R_per_K", "alpha_L_per_K", "T_ref_K", "coupling"}},
      {"coil_b", {"R0_ohm", "L0_H", "alpha_R_per_K", "alpha_L_per_K", "T_ref_K", "coupling"}},
      {"chain", {"fill_factor", "model", "background", "amplifier_table", "reference_gain", "field_correction",
                 "field_correction_c", "field_correction_p"}},
      {"noise", {"snr_db", "background_noise"}},
      {"temperature", {"program", "T_K", "T_start_K", "T_end_K", "duration_s", "time_constant_s", "cadence_hz"}},
      {"ambient", {"baseline_K", "coupling", "drift_K_per_s"}},
      {"calibration", {"kind", "temperatures_K"}},
      {"estimator", {"mode", "reference", "phi_o_rad"}},
      {"run", {"trials", "seed", "threads", "output"}},
  };
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

class Reader {
 public:
  explicit Reader(const ptree& pt) : pt_(pt) {}

  std::optional<std::string> str(const std::string& key) const {
    auto v = pt_.get_optional<std::string>(ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    std::string s = *v;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    return s;
  }

  void num(const std::string& key, double& out, double scale = 1.0) const {
    if (auto s = str(key)) {
      try {
        out = parse_number(lower(*s)) * scale;
      } catch (const Error&) {
        throw ConfigError("'" + key + "' is not a number: '" + *s + "'");
      }
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) const {
    double v = double(out);
    num(key, v);
    if (v != std::floor(v) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be an integer");
    out = Int(v);
  }

  void flag(const std::string& key, bool& out) const {
    if (auto s = str(key)) {
      const auto v = lower(*s);
      if (v == "true" || v == "yes" || v == "1" || v == "on") {
        out = true;
      } else if (v == "false" || v == "no" || v == "0" || v == "off") {
        out = false;
      } else {
        throw ConfigError("'" + key + "' must be true or false");
      }
    }
  }

 private:
  const ptree& pt_;
};

void read_coil(const Reader& r, const std::string& sec, CoilParams& c) {
  r.num(sec + ".R0_ohm", c.R0);
  r.num(sec + ".L0_H", c.L0);
  r.num(sec + ".alpha_R_per_K", c.alpha_R);
  r.num(sec + ".alpha_L_per_K", c.alpha_L);
  r.num(sec + ".T_ref_K", c.T_ref);
  r.num(sec + ".coupling", c.coupling);
}

std::vector<double> number_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    try {
      out.push_back(parse_number(item));
    } catch (const Error&) {
      throw ConfigError("'" + key + "' contains a non-number: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& base_dir) {
  ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : pt) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown config section [" + section + "]");
    if (!body.data().empty() && body.empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
  const Reader r(pt);
  ScenarioConfig c;

  auto& p = c.particle;
  r.num("particle.d_core_nm", p.d_core, 1e-9);
  p.d_hydro = p.d_core;
  r.num("particle.d_hydro_nm", p.d_hydro, 1e-9);
  r.num("particle.K_aniso_J_m3", p.K_aniso);
  r.num("particle.Ms_A_m", p.Ms_bulk);
  if (r.str("particle.moment_A_m2")) {
    double m = 0.0;
    r.num("particle.moment_A_m2", m);
    p.moment = m;
  }
  r.num("particle.N_conc_m3", p.N_conc);
  r.num("particle.eta_Pa_s", p.eta);
  r.num("particle.tau0_s", p.tau0);

  auto& d = c.chain.distribution;
  if (auto k = r.str("distribution.kind")) {
    if (*k == "monodisperse") {
      d.kind = DistributionKind::Monodisperse;
    } else if (*k == "lognormal") {
      d.kind = DistributionKind::Lognormal;
    } else {
      throw ConfigError("distribution.kind must be monodisperse or lognormal");
    }
  }
  d.median_d = p.d_core;
  r.num("distribution.median_d_nm", d.median_d, 1e-9);
  r.num("distribution.sigma_log", d.sigma_log);
  r.integer("distribution.n_quadrature", d.n_quadrature);

  std::int64_t fh = c.field.f_high_hz(), fl = c.field.f_low_hz();
  double bh = c.field.B_high(), bl = c.field.B_low(), ph = 0.0, pl = 0.0;
  r.integer("field.f_high_hz", fh);
  r.integer("field.f_low_hz", fl);
  r.num("field.B_high_mT", bh, 1e-3);
  r.num("field.B_low_mT", bl, 1e-3);
  r.num("field.phase_high_rad", ph);
  r.num("field.phase_low_rad", pl);
  r.integer("field.mains_hz", c.mains);
  c.field = FieldConfig(fh, fl, bh, bl, ph, pl);

  r.num("acquisition.sample_rate_hz", c.chain.acquisition.sample_rate);
  r.integer("acquisition.window_periods", c.chain.acquisition.window_periods);
  read_coil(r, "coil_a", c.chain.coil_a);
  read_coil(r, "coil_b", c.chain.coil_b);

  r.num("chain.fill_factor", c.chain.fill_factor);
  if (auto m = r.str("chain.model")) {
    if (*m == "spectral") {
      c.chain.model = ForwardModel::Spectral;
    } else if (*m == "composed") {
      c.chain.model = ForwardModel::Composed;
    } else {
      throw ConfigError("chain.model must be spectral or composed");
    }
  }
  if (auto b = r.str("chain.background")) {
    if (*b == "fixed") {
      c.fixed_background = true;
    } else if (*b == "live") {
      c.fixed_background = false;
    } else {
      throw ConfigError("chain.background must be fixed or live");
    }
  }
  double ref_gain = 1000.0;
  r.num("chain.reference_gain", ref_gain);
  if (auto t = r.str("chain.amplifier_table"); t && !t->empty()) {
    std::filesystem::path path(*t);
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    c.amplifier_table = *t;
    c.chain.amplifier = AmplifierModel::load(path.string(), ref_gain);
  } else if (r.str("chain.reference_gain")) {
    auto rows = AmplifierModel::placeholder().rows();
    for (auto& row : rows) row.gain *= ref_gain / 1000.0;
    c.chain.amplifier = AmplifierModel(rows, ref_gain);
  }
  if (auto fc = r.str("chain.field_correction")) {
    double cc = 0.126, pp = 1.72;
    r.num("chain.field_correction_c", cc);
    r.num("chain.field_correction_p", pp);
    if (*fc == "none") {
      c.chain.field_correction = FieldCorrectionModel();
    } else if (*fc == "empirical") {
      c.chain.field_correction = FieldCorrectionModel::empirical(cc, pp);
    } else {
      throw ConfigError("chain.field_correction must be none or empirical");
    }
  }

  r.num("noise.snr_db", c.chain.noise.snr_db);
  r.flag("noise.background_noise", c.chain.noise.background);

  auto& tp = c.temperature;
  if (auto k = r.str("temperature.program")) {
    if (*k == "constant") {
      tp.kind = TemperatureProgram::Kind::Constant;
    } else if (*k == "cooling") {
      tp.kind = TemperatureProgram::Kind::Cooling;
    } else {
      throw ConfigError("temperature.program must be constant or cooling");
    }
  }
  r.num("temperature.T_K", tp.T_start);
  tp.T_end = tp.T_start;
  r.num("temperature.T_start_K", tp.T_start);
  r.num("temperature.T_end_K", tp.T_end);
  if (tp.kind == TemperatureProgram::Kind::Constant) tp.T_end = tp.T_start;
  r.num("temperature.duration_s", tp.duration);
  r.num("temperature.time_constant_s", tp.time_constant);
  r.num("temperature.cadence_hz", tp.cadence);

  r.num("ambient.baseline_K", c.ambient.baseline);
  r.num("ambient.coupling", c.ambient.coupling);
  r.num("ambient.drift_K_per_s", c.ambient.drift);

  if (auto k = r.str("calibration.kind")) c.calibration.kind = parse_calibration_kind(*k);
  if (auto t = r.str("calibration.temperatures_K")) {
    c.calibration.temperatures = number_list(*t, "calibration.temperatures_K");
  } else {
    c.calibration.temperatures = {tp.T_start};
  }

  if (auto m = r.str("estimator.mode")) c.estimator.mode = parse_estimator_mode(*m);
  if (auto m = r.str("estimator.reference")) c.estimator.reference = parse_reference_mode(*m);
  r.num("estimator.phi_o_rad", c.estimator.phi_o);

  r.integer("run.trials", c.trials);
  r.integer("run.seed", c.seed);
  r.integer("run.threads", c.threads);
  if (auto o = r.str("run.output")) c.output = *o;

  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(in, dir.empty() ? "." : dir.string());
}

void write_scenario(std::ostream& os, const ScenarioConfig& c) {
  // 15 digits keeps unit-scaled values such as 30 nm readable
  const auto n = [](double x) {
    if (!std::isfinite(x)) return format_number(x);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::string(buf);
  };
  const auto& p = c.particle;
  os << "[particle]\n"
     << "d_core_nm = " << n(p.d_core * 1e9) << "\n"
     << "d_hydro_nm = " << n(p.d_hydro * 1e9) << "\n"
     << "K_aniso_J_m3 = " << n(p.K_aniso) << "\n"
     << "Ms_A_m = " << n(p.Ms_bulk) << "\n";
  if (p.moment) os << "moment_A_m2 = " << n(*p.moment) << "\n";
  os << "N_conc_m3 = " << n(p.N_conc) << "\n"
     << "eta_Pa_s = " << n(p.eta) << "\n"
     << "tau0_s = " << n(p.tau0) << "\n\n";
  const auto& d = c.chain.distribution;
  os << "[distribution]\n"
     << "kind = " << (d.kind == DistributionKind::Monodisperse ? "monodisperse" : "lognormal") << "\n"
     << "median_d_nm = " << n(d.median_d * 1e9) << "\n"
     << "sigma_log = " << n(d.sigma_log) << "\n"
     << "n_quadrature = " << d.n_quadrature << "\n\n";
  os << "[field]\n"
     << "f_high_hz = " << c.field.f_high_hz() << "\n"
     << "f_low_hz = " << c.field.f_low_hz() << "\n"
     << "B_high_mT = " << n(c.field.B_high() * 1e3) << "\n"
     << "B_low_mT = " << n(c.field.B_low() * 1e3) << "\n"
     << "phase_high_rad = " << n(c.field.phase_high()) << "\n"
     << "phase_low_rad = " << n(c.field.phase_low()) << "\n"
     << "mains_hz = " << c.mains << "\n\n";
  os << "[acquisition]\n"
     << "sample_rate_hz = " << n(c.chain.acquisition.sample_rate) << "\n"
     << "window_periods = " << c.chain.acquisition.window_periods << "\n\n";
  for (const auto& [name, coil] : {std::pair{"coil_a", c.chain.coil_a}, std::pair{"coil_b", c.chain.coil_b}}) {
    os << "[" << name << "]\n"
       << "R0_ohm = " << n(coil.R0) << "\n"
       << "L0_H = " << n(coil.L0) << "\n"
       << "alpha_R_per_K = " << n(coil.alpha_R) << "\n"
       << "alpha_L_per_K = " << n(coil.alpha_L) << "\n"
       << "T_ref_K = " << n(coil.T_ref) << "\n"
       << "coupling = " << n(coil.coupling) << "\n\n";
  }
  os << "[chain]\n"
     << "fill_factor = " << n(c.chain.fill_factor) << "\n"
     << "model = " << (c.chain.model == ForwardModel::Spectral ? "spectral" : "composed") << "\n"
     << "background = " << (c.fixed_background ? "fixed" : "live") << "\n";
  if (!c.amplifier_table.empty()) os << "amplifier_table = " << c.amplifier_table << "\n";
  os << "reference_gain = " << n(c.chain.amplifier.reference_gain()) << "\n";
  os << "field_correction = "
     << (c.chain.field_correction.kind() == FieldCorrectionModel::Kind::Empirical ? "empirical" : "none") << "\n\n";
  os << "[noise]\n"
     << "snr_db = " << n(c.chain.noise.snr_db) << "\n"
     << "background_noise = " << (c.chain.noise.background ? "true" : "false") << "\n\n";
  const auto& tp = c.temperature;
  os << "[temperature]\n"
     << "program = " << (tp.kind == TemperatureProgram::Kind::Constant ? "constant" : "cooling") << "\n"
     << "T_start_K = " << n(tp.T_start) << "\n"
     << "T_end_K = " << n(tp.T_end) << "\n"
     << "duration_s = " << n(tp.duration) << "\n"
     << "time_constant_s = " << n(tp.time_constant) << "\n"
     << "cadence_hz = " << n(tp.cadence) << "\n\n";
  os << "[ambient]\n"
     << "baseline_K = " << n(c.ambient.baseline) << "\n"
     << "coupling = " << n(c.ambient.coupling) << "\n"
     << "drift_K_per_s = " << n(c.ambient.drift) << "\n\n";
  os << "[calibration]\n"
     << "kind = " << to_string(c.calibration.kind) << "\n"
     << "temperatures_K = ";
  for (std::size_t i = 0; i < c.calibration.temperatures.size(); ++i) {
    os << (i ? ", " : "") << n(c.calibration.temperatures[i]);
  }
  os << "\n\n[estimator]\n"
     << "mode = " << to_string(c.estimator.mode) << "\n"
     << "reference = " << to_string(c.estimator.reference) << "\n"
     << "phi_o_rad = " << n(c.estimator.phi_o) << "\n\n";
  os << "[run]\n"
     << "trials = " << c.trials << "\n"
     << "seed = " << c.seed << "\n"
     << "threads = " << c.threads << "\n";
  if (!c.output.empty()) os << "output = " << c.output << "\n";
}

// ---------------------------------------------------------------- running

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? std::size_t(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

ChainConfig effective_chain(const ScenarioConfig& cfg) {
  ChainConfig chain = cfg.chain;
  if (cfg.fixed_background) {
    chain.background_ambient = cfg.ambient.baseline;
  } else {
    chain.background_ambient.reset();
  }
  return chain;
}

MeasurementChannels noiseless_channels(const ScenarioConfig& cfg, const ChainConfig& chain, double T, double T_amb) {
  const auto lines = simulate_lines(cfg.field, cfg.particle, T, chain, T_amb);
  return render_channels(lines, chain.acquisition, NoiseModel{}, chain.amplifier.reference_gain());
}

}  // namespace

CalibrationModel calibrate_scenario(const ScenarioConfig& cfg) {
  const auto plan = cfg.plan();
  const auto chain = effective_chain(cfg);
  const auto unit = CalibrationModel::from_constant(1.0);
  std::vector<CalibrationPoint> points;
  for (double T : cfg.calibration.temperatures) {
    const auto ch = noiseless_channels(cfg, chain, T, cfg.ambient.baseline);
    const auto est = estimate_temperature(ch, plan, chain.amplifier, unit, cfg.estimator);
    if (!est.valid) {
      throw EstimationError("calibration point at " + format_number(T) + " K failed: " + est.reason);
    }
    points.push_back({est.tau_est, T});
  }
  return calibrate(points, cfg.calibration.kind);
}

ExperimentResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto plan = cfg.plan();
  const auto chain = effective_chain(cfg);
  ExperimentResult res;
  res.calibration = calibrate_scenario(cfg);

  const auto times = cfg.temperature.times();
  const double T0 = cfg.temperature.at(0.0);
  const std::size_t trials = std::size_t(cfg.trials);
  res.records.resize(times.size() * trials);

  parallel_for(times.size(), cfg.threads, [&](std::size_t i) {
    const double t = times[i];
    const double T = cfg.temperature.at(t);
    const double T_amb = cfg.ambient.at(t, T, T0);
    const auto clean = noiseless_channels(cfg, chain, T, T_amb);
    const double sigma = noise_sigma(clean.sample_peak, chain.noise.snr_db);
    for (std::size_t j = 0; j < trials; ++j) {
      const std::size_t k = i * trials + j;
      const auto ch =
          sigma > 0.0 ? with_noise(clean, sigma, sigma / chain.amplifier.reference_gain(), chain.noise.background,
                                   derive_seed(cfg.seed, k))
                      : clean;
      const auto est = estimate_temperature(ch, plan, chain.amplifier, res.calibration, cfg.estimator);
      Record& r = res.records[k];
      r.t = t;
      r.trial = int(j);
      r.T_true = T;
      r.T_amb = T_amb;
      r.T_est = est.T_est;
      r.tau_est = est.tau_est;
      r.phi_H = est.phi_H;
      r.phi_plus = est.phi_plus;
      r.phi_minus = est.phi_minus;
      r.valid = est.valid;
      r.reason = est.reason;
      r.error = est.valid ? est.T_est - T : TemperatureEstimate::kNaN;
    }
  });

  const auto& cal = res.calibration;
  res.metadata = {
      "f_high_hz=" + std::to_string(plan.f_high),
      "f_low_hz=" + std::to_string(plan.f_low),
      "f_plus_hz=" + std::to_string(plan.f_plus),
      "f_minus_hz=" + std::to_string(plan.f_minus),
      "sample_rate_hz=" + format_number(plan.sample_rate),
      "window_periods=" + std::to_string(plan.window_periods),
      "mode=" + to_string(cfg.estimator.mode),
      "reference=" + to_string(cfg.estimator.reference),
      "snr_db=" + format_number(chain.noise.snr_db),
      "background=" + std::string(cfg.fixed_background ? "fixed" : "live"),
      "calibration=" + to_string(cal.kind),
      "calibration_A_Ks=" + format_number(cal.A),
      "calibration_B_K=" + format_number(cal.B),
      "seed=" + std::to_string(cfg.seed),
      "trials=" + std::to_string(cfg.trials),
  };
  return res;
}

Summary summarize(const std::vector<Record>& records) {
  Summary s;
  s.n = records.size();
  double sum = 0.0, max_abs = 0.0;
  for (const auto& r : records) {
    if (!r.valid) continue;
    ++s.n_valid;
    sum += r.error;
    max_abs = std::max(max_abs, std::abs(r.error));
  }
  if (s.n_valid == 0) return s;
  s.max_abs_error = max_abs;
  s.mean_error = sum / double(s.n_valid);
  if (s.n_valid > 1) {
    double ss = 0.0;
    for (const auto& r : records) {
      if (r.valid) ss += (r.error - s.mean_error) * (r.error - s.mean_error);
    }
    s.std_error = std::sqrt(ss / double(s.n_valid - 1));
  }
  return s;
}

std::string summary_line(const Summary& s) {
  return "summary: n=" + std::to_string(s.n) + " n_valid=" + std::to_string(s.n_valid) +
         " max_abs_error_K=" + format_number(s.max_abs_error) + " mean_error_K=" + format_number(s.mean_error) +
         " std_error_K=" + format_number(s.std_error);
}

namespace {

const std::vector<std::string> kRecordColumns = {"t_s",      "trial",     "T_true_K", "T_amb_K", "T_est_K",
                                                 "tau_est_s", "phi_H_rad", "phi_plus_rad", "phi_minus_rad",
                                                 "error_K",  "valid",     "reason"};

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

CsvTable to_table(const ExperimentResult& r) {
  CsvTable t;
  t.preamble = r.metadata;
  t.columns = kRecordColumns;
  for (const auto& rec : r.records) {
    t.rows.push_back({format_number(rec.t), std::to_string(rec.trial), format_number(rec.T_true),
                      format_number(rec.T_amb), format_number(rec.T_est), format_number(rec.tau_est),
                      format_number(rec.phi_H), format_number(rec.phi_plus), format_number(rec.phi_minus),
                      format_number(rec.error), rec.valid ? "1" : "0", sanitize(rec.reason)});
  }
  t.trailer.push_back(summary_line(r.summary()));
  return t;
}

std::vector<Record> records_from_table(const CsvTable& t) {
  std::vector<std::size_t> idx;
  for (const auto& c : kRecordColumns) idx.push_back(t.column(c));
  std::vector<Record> out;
  for (const auto& row : t.rows) {
    Record r;
    r.t = parse_number(row[idx[0]]);
    r.trial = int(parse_number(row[idx[1]]));
    r.T_true = parse_number(row[idx[2]]);
    r.T_amb = parse_number(row[idx[3]]);
    r.T_est = parse_number(row[idx[4]]);
    r.tau_est = parse_number(row[idx[5]]);
    r.phi_H = parse_number(row[idx[6]]);
    r.phi_plus = parse_number(row[idx[7]]);
    r.phi_minus = parse_number(row[idx[8]]);
    r.error = parse_number(row[idx[9]]);
    r.valid = row[idx[10]] == "1";
    r.reason = row[idx[11]];
    out.push_back(std::move(r));
  }
  return out;
}

void emit_csv(const ExperimentResult& r, const std::string& path) { write_csv(path, to_table(r)); }

SnrMatch match_snr(ScenarioConfig cfg, double target_std, double start_snr_db, int max_iter, double rel_tol) {
  if (!(target_std > 0.0)) throw ConfigError("target standard deviation must be > 0");
  if (!std::isfinite(start_snr_db)) throw ConfigError("start SNR must be finite");
  SnrMatch m;
  double s = start_snr_db;
  for (int k = 0; k < max_iter; ++k) {
    cfg.chain.noise.snr_db = s;
    const auto sum = run_scenario(cfg).summary();
    if (!(sum.std_error > 0.0)) throw EstimationError("scenario produced no error spread at " + format_number(s));
    m.steps.emplace_back(s, sum.std_error);
    m.snr_db = s;
    m.std_error = sum.std_error;
    if (std::abs(sum.std_error / target_std - 1.0) <= rel_tol) break;
    s += 20.0 * std::log10(sum.std_error / target_std);
  }
  return m;
}

CsvTable channels_to_table(const MeasurementChannels& ch) {
  ch.validate();
  CsvTable t;
  t.add_meta("sample_rate_hz", ch.diff_sample.sample_rate);
  t.add_meta("f_base_hz", ch.f_base);
  t.add_meta("noise_sigma_V", ch.noise_sigma);
  t.columns = {"t_s", "diff_background_V", "diff_sample_V", "ref_A_V"};
  t.rows.reserve(ch.diff_sample.size());
  for (std::size_t i = 0; i < ch.diff_sample.size(); ++i) {
    t.rows.push_back({format_number(ch.diff_sample.time(i)), format_number(ch.diff_background.samples[i]),
                      format_number(ch.diff_sample.samples[i]), format_number(ch.ref_A.samples[i])});
  }
  return t;
}

MeasurementChannels channels_from_table(const CsvTable& t) {
  const auto fs = t.meta("sample_rate_hz");
  const auto fb = t.meta("f_base_hz");
  if (fs.empty() || fb.empty()) throw IoError("channel CSV needs sample_rate_hz and f_base_hz metadata");
  MeasurementChannels ch;
  ch.f_base = parse_number(fb);
  if (const auto s = t.meta("noise_sigma_V"); !s.empty()) ch.noise_sigma = parse_number(s);
  const auto time = t.numeric_column("t_s");
  if (time.empty()) throw IoError("channel CSV has no samples");
  const auto make = [&](const std::string& col) {
    TimeSeries ts;
    ts.sample_rate = parse_number(fs);
    ts.t0 = time.front();
    ts.samples = t.numeric_column(col);
    ts.unit = Unit::Volt;
    return ts;
  };
  ch.diff_background = make("diff_background_V");
  ch.diff_sample = make("diff_sample_V");
  ch.ref_A = make("ref_A_V");
  try {
    ch.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("channel CSV: ") + e.what());
  }
  return ch;
}

}  // namespace mnpt
