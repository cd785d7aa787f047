#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "mnpt/constants.hpp"
#include "mnpt/csv.hpp"
#include "mnpt/error.hpp"
#include "mnpt/figures.hpp"
#include "mnpt/plan.hpp"
#include "mnpt/scenario.hpp"

using namespace mnpt;
namespace fs = std::filesystem;

namespace {

ScenarioConfig short_config() {
  ScenarioConfig c;
  c.chain.acquisition.window_periods = 1;
  c.temperature.duration = 4.0;
  c.chain.noise.snr_db = 40.0;
  c.trials = 2;
  c.seed = 3;
  c.threads = 2;
  return c;
}

std::string csv_text(const ExperimentResult& r) {
  std::ostringstream os;
  write_csv(os, to_table(r));
  return os.str();
}

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / "mnpt_scenario_tests";
  fs::create_directories(d);
  return d;
}

bool has(const std::vector<PlanViolation>& v, PlanViolation x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("nominal frequency plan") {
  const auto p = plan_frequencies(6000, 1570, 500e3, 50);
  CHECK(p.f_plus == 9140);
  CHECK(p.f_minus == 2860);
  CHECK(p.f_base == 10);
  CHECK(check_plan(6000, 1570, 500e3).valid());
}

TEST_CASE("plan rejections") {
  auto r = check_plan(6000, 1500, 500e3, 50);
  CHECK_FALSE(r.valid());
  CHECK(has(r.violations, PlanViolation::PlusLineOnMains));
  CHECK(r.plan.f_plus == 9000);
  CHECK(r.describe().find("9000") != std::string::npos);

  r = check_plan(5000, 1250, 500e3, 50);
  CHECK(has(r.violations, PlanViolation::PlusLineOnMains));
  CHECK(has(r.violations, PlanViolation::MinusLineOnMains));
  CHECK(r.violations.size() == 2);

  r = check_plan(6000, 3100, 12345, 50, 0);
  CHECK(has(r.violations, PlanViolation::MinusLineNotPositive));
  CHECK(has(r.violations, PlanViolation::NonCommensurate));
  CHECK(has(r.violations, PlanViolation::SampleRateTooLow));
  CHECK(has(r.violations, PlanViolation::BadWindow));

  CHECK(has(check_plan(0, 1570, 500e3).violations, PlanViolation::NonPositiveFrequency));
  CHECK(check_plan(6000, 1500, 600e3, 0).valid());

  try {
    plan_frequencies(5000, 1250, 500e3, 50);
    FAIL("expected a rejection");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("plus_line_on_mains") != std::string::npos);
    CHECK(msg.find("minus_line_on_mains") != std::string::npos);
  }
}

TEST_CASE("valid plans satisfy every constraint") {
  for (std::int64_t fh = 3000; fh <= 9000; fh += 370) {
    for (std::int64_t fl = 100; 2 * fl < fh; fl += 230) {
      const auto r = check_plan(fh, fl, 500e3);
      if (!r.valid()) continue;
      const auto& p = r.plan;
      CHECK(p.f_minus > 0);
      CHECK(p.f_plus % 50 != 0);
      CHECK(p.f_minus % 50 != 0);
      CHECK(p.sample_rate >= 10.0 * double(p.f_plus));
      CHECK(std::fmod(p.sample_rate, double(p.f_base)) == 0.0);
      for (auto f : {p.f_high, p.f_low, p.f_plus, p.f_minus}) CHECK(f % p.f_base == 0);
    }
  }
}

TEST_CASE("numbers round-trip through text") {
  for (double x : {0.0, -0.0, 1.0, 0.1, 315.6, 1.0240e-5, 6.02214076e23, -3.3e-300, 5e-324}) {
    CHECK(parse_number(format_number(x)) == x);
  }
  CHECK(std::isnan(parse_number(format_number(std::nan("")))));
  CHECK(parse_number(format_number(HUGE_VAL)) == HUGE_VAL);
  CHECK(parse_number(format_number(-HUGE_VAL)) == -HUGE_VAL);
  CHECK_THROWS_AS(parse_number("12x"), IoError);
}

TEST_CASE("csv tables") {
  CsvTable t;
  t.add_meta("seed", "4");
  t.add_meta("T", 315.6);
  t.columns = {"a", "b"};
  t.rows = {{"1", "2"}, {"3", "nan"}};
  t.trailer = {"summary: ok"};
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() == "# seed=4\n# T=315.6\na,b\n1,2\n3,nan\n# summary: ok\n");
  std::istringstream is(os.str());
  const auto back = read_csv(is);
  CHECK(back.meta("seed") == "4");
  CHECK(back.meta("missing").empty());
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.trailer == t.trailer);
  CHECK(back.numeric_column("a") == std::vector<double>{1.0, 3.0});
  CHECK_THROWS_AS(back.column("c"), IoError);

  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), IoError);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), IoError);
  CHECK_THROWS_AS(write_csv("/nonexistent/dir/out.csv", t), IoError);
}

TEST_CASE("temperature programs") {
  TemperatureProgram c;
  CHECK(c.at(0.0) == 315.6);
  CHECK(c.at(99.0) == 315.6);
  CHECK(c.times().size() == 120);

  TemperatureProgram cool;
  cool.kind = TemperatureProgram::Kind::Cooling;
  cool.T_start = 320.0;
  cool.T_end = 310.0;
  CHECK(cool.at(0.0) == doctest::Approx(320.0));
  CHECK(cool.at(cool.duration) == doctest::Approx(310.0));
  double prev = 1e9;
  for (double t : cool.times()) {
    CHECK(cool.at(t) < prev);
    prev = cool.at(t);
  }
  cool.cadence = 2.0;
  CHECK(cool.times().size() == 240);
  CHECK(cool.times()[1] == 0.5);
  cool.T_end = -1.0;
  CHECK_THROWS_AS(cool.validate(), ConfigError);

  AmbientProgram amb{298.15, 0.02, 0.001};
  CHECK(amb.at(10.0, 315.0, 320.0) == doctest::Approx(298.15 - 0.1 + 0.01));
}

TEST_CASE("config text") {
  std::istringstream in(
      "# comment\n"
      "[field]\n"
      "f_high_hz = 6000\n"
      "f_low_hz = 1570\n"
      "[chain]\n"
      "fill_factor = 0.2\n"
      "model = composed\n"
      "background = live\n"
      "[temperature]\n"
      "program = cooling\n"
      "T_start_K = 320\n"
      "T_end_K = 310\n"
      "[calibration]\n"
      "kind = affine\n"
      "temperatures_K = 310, 315, 320\n"
      "[estimator]\n"
      "mode = single\n"
      "[run]\n"
      "trials = 3\n"
      "seed = 99\n");
  const auto c = parse_scenario(in);
  CHECK(c.chain.fill_factor == 0.2);
  CHECK(c.chain.model == ForwardModel::Composed);
  CHECK_FALSE(c.fixed_background);
  CHECK(c.temperature.kind == TemperatureProgram::Kind::Cooling);
  CHECK(c.calibration.kind == CalibrationModel::Kind::AffineInInverseTau);
  CHECK(c.calibration.temperatures == std::vector<double>{310, 315, 320});
  CHECK(c.estimator.mode == EstimatorMode::Single);
  CHECK(c.trials == 3);
  CHECK(c.seed == 99);
}

TEST_CASE("config errors") {
  const auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_scenario(in);
  };
  CHECK_THROWS_AS(parse("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[field]\nf_hi = 6000\n"), ConfigError);
  CHECK_THROWS_AS(parse("[field]\nf_high_hz = six\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\ntrials = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\ntrials = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[chain]\nmodel = magic\n"), ConfigError);
  CHECK_THROWS_AS(parse("[field]\nf_low_hz = 1500\n"), ConfigError);
  CHECK_THROWS_AS(parse("[particle]\nd_hydro_nm = 10\n"), DomainError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/config.ini"), IoError);
}

TEST_CASE("config write and read back") {
  auto c = short_config();
  c.chain.coil_b.R0 = 11.0;
  c.ambient.coupling = 0.03;
  c.calibration.kind = CalibrationModel::Kind::AffineInInverseTau;
  c.calibration.temperatures = {310.0, 320.0};
  c.chain.field_correction = FieldCorrectionModel::empirical();
  std::ostringstream os;
  write_scenario(os, c);
  std::istringstream is(os.str());
  const auto d = parse_scenario(is);
  std::ostringstream again;
  write_scenario(again, d);
  CHECK(again.str() == os.str());
  CHECK(d.chain.coil_b.R0 == 11.0);
  CHECK(d.chain.field_correction.kind() == FieldCorrectionModel::Kind::Empirical);
}

TEST_CASE("relative amplifier paths resolve against the config") {
  const auto dir = temp_dir();
  {
    std::ofstream amp(dir / "amp.csv");
    amp << "frequency_hz,phase_deg,gain\n0,0,500\n100000,-30,400\n";
    std::ofstream cfg(dir / "cfg.ini");
    cfg << "[chain]\namplifier_table = amp.csv\nreference_gain = 500\n";
  }
  const auto c = load_scenario((dir / "cfg.ini").string());
  CHECK(c.chain.amplifier.gain(0.0) == 500.0);
  CHECK(c.chain.amplifier.phase(100e3) == doctest::Approx(-30.0 * kPi / 180.0));

  CHECK_NOTHROW(load_scenario(std::string(MNPT_CONFIG_DIR) + "/static_315.ini"));
  CHECK_NOTHROW(load_scenario(std::string(MNPT_CONFIG_DIR) + "/dynamic_cooling.ini"));
  CHECK_NOTHROW(AmplifierModel::load(std::string(MNPT_DATA_DIR) + "/amplifier_placeholder.csv"));
}

TEST_CASE("scenario runs are deterministic and complete") {
  const auto c = short_config();
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  CHECK(a.records.size() == 4 * 2);
  CHECK(csv_text(a) == csv_text(b));

  auto serial = c;
  serial.threads = 1;
  CHECK(csv_text(run_scenario(serial)) == csv_text(a));

  auto reseeded = c;
  reseeded.seed = 4;
  CHECK(csv_text(run_scenario(reseeded)) != csv_text(a));
}

TEST_CASE("summary is recomputable from records") {
  const auto r = run_scenario(short_config());
  std::vector<double> e;
  for (const auto& rec : r.records) {
    CHECK(rec.valid);
    CHECK(rec.error == doctest::Approx(rec.T_est - rec.T_true));
    e.push_back(rec.error);
  }
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / double(e.size());
  double var = 0.0, mx = 0.0;
  for (double x : e) {
    var += (x - mean) * (x - mean);
    mx = std::max(mx, std::abs(x));
  }
  const auto s = r.summary();
  CHECK(s.n == e.size());
  CHECK(s.n_valid == e.size());
  CHECK(s.mean_error == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.std_error == doctest::Approx(std::sqrt(var / double(e.size() - 1))).epsilon(1e-12));
  CHECK(s.max_abs_error == mx);

  std::istringstream is(csv_text(r));
  const auto t = read_csv(is);
  REQUIRE(t.trailer.size() == 1);
  CHECK(t.trailer[0] == summary_line(s));
}

TEST_CASE("records round-trip through csv") {
  const auto r = run_scenario(short_config());
  std::istringstream is(csv_text(r));
  const auto back = records_from_table(read_csv(is));
  REQUIRE(back.size() == r.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].t == r.records[i].t);
    CHECK(back[i].trial == r.records[i].trial);
    CHECK(back[i].T_true == r.records[i].T_true);
    CHECK(back[i].T_est == r.records[i].T_est);
    CHECK(back[i].tau_est == r.records[i].tau_est);
    CHECK(back[i].phi_plus == r.records[i].phi_plus);
    CHECK(back[i].valid == r.records[i].valid);
  }
}

TEST_CASE("empty result writes a header only") {
  ExperimentResult r;
  const auto t = to_table(r);
  CHECK(t.rows.empty());
  const auto path = (temp_dir() / "empty.csv").string();
  emit_csv(r, path);
  const auto back = read_csv(path);
  CHECK(back.columns.size() == 12);
  CHECK(back.rows.empty());
}

TEST_CASE("failed estimates stay in the records") {
  auto c = short_config();
  c.estimator.reference = ReferenceMode::SameLine;
  c.calibration.temperatures = {315.6};
  CHECK_THROWS_AS(run_scenario(c), EstimationError);

  auto d = short_config();
  d.chain.noise.snr_db = -40.0;
  d.trials = 10;
  const auto r = run_scenario(d);
  CHECK(r.records.size() == 40);
  std::size_t invalid = 0;
  for (const auto& rec : r.records) {
    if (!rec.valid) {
      ++invalid;
      CHECK(std::isnan(rec.T_est));
      CHECK_FALSE(rec.reason.empty());
    }
  }
  CHECK(invalid > 0);
  CHECK(r.summary().n_valid == r.records.size() - invalid);
}

TEST_CASE("composed model without noise is exact") {
  auto c = short_config();
  c.chain = testing::flat_chain();
  c.chain.acquisition.window_periods = 1;
  c.chain.model = ForwardModel::Composed;
  c.chain.noise = {};
  c.fixed_background = false;
  c.trials = 1;
  c.temperature.kind = TemperatureProgram::Kind::Cooling;
  c.temperature.T_start = 320.0;
  c.temperature.T_end = 310.0;
  c.temperature.duration = 5.0;
  c.temperature.time_constant = 2.0;
  const auto r = run_scenario(c);
  for (const auto& rec : r.records) CHECK(std::abs(rec.error) < 1e-9);
}

TEST_CASE("channel csv round trip") {
  auto chain = ChainConfig{};
  chain.acquisition.window_periods = 1;
  chain.noise.snr_db = 35.0;
  const FieldConfig field(6000, 1570, 0.36e-3, 1.98e-3);
  const auto ch = simulate_channels(field, ParticleSpec{}, 312.0, chain, 298.15);
  std::ostringstream os;
  write_csv(os, channels_to_table(ch));
  std::istringstream is(os.str());
  const auto back = channels_from_table(read_csv(is));
  CHECK(back.f_base == ch.f_base);
  CHECK(back.noise_sigma == ch.noise_sigma);
  CHECK(back.diff_sample.sample_rate == ch.diff_sample.sample_rate);
  CHECK(back.diff_sample.samples == ch.diff_sample.samples);
  CHECK(back.diff_background.samples == ch.diff_background.samples);
  CHECK(back.ref_A.samples == ch.ref_A.samples);

  std::istringstream bad("t_s,diff_sample_V\n0,1\n");
  CHECK_THROWS_AS(channels_from_table(read_csv(bad)), IoError);
}

TEST_CASE("snr matching converges") {
  auto c = short_config();
  c.trials = 20;
  const auto m = match_snr(c, 0.1, 30.0, 6, 0.05);
  CHECK(m.std_error == doctest::Approx(0.1).epsilon(0.05));
  CHECK_FALSE(m.steps.empty());
  CHECK(m.steps.front().first == 30.0);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw DomainError("boom");
                  }),
                  DomainError);
}

TEST_CASE("figure ids") {
  CHECK(figure_ids() == std::vector<std::string>{"fig1", "fig2a", "fig2b", "fig3", "fig4", "fig8", "fig9"});
  CHECK_THROWS_AS(generate_figure("fig5"), ConfigError);
}

TEST_CASE("relaxation against diameter") {
  const auto t = figure4();
  const auto d = t.numeric_column("d_core_nm");
  const auto coat = t.numeric_column("coating_nm");
  const auto K = t.numeric_column("K_J_m3");
  const auto tB = t.numeric_column("tau_B_s");
  const auto te = t.numeric_column("tau_eff_s");
  bool seen = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(te[i] <= tB[i]);
    if (d[i] == 30.0 && coat[i] == 0.0 && K[i] == 20e3) {
      CHECK(te[i] / tB[i] == doctest::Approx(1.0).epsilon(0.05));
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("response against frequency and field") {
  const auto a = figure2a();
  const auto att = a.numeric_column("attenuation");
  const auto ph = a.numeric_column("phase_rad");
  for (std::size_t i = 1; i < att.size(); ++i) {
    CHECK(att[i] < att[i - 1]);
    CHECK(ph[i] > ph[i - 1]);
  }
  const auto b = figure2b();
  const auto ratio = b.numeric_column("tau_ratio");
  CHECK(ratio.front() == 1.0);
  for (std::size_t i = 1; i < ratio.size(); ++i) CHECK(ratio[i] <= ratio[i - 1]);
}

TEST_CASE("least squares slope") {
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares_slope({1}, {1}), DomainError);
}

}  // TEST_SUITE
