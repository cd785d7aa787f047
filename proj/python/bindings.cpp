#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mnpt/error.hpp"
#include "mnpt/estimator.hpp"
#include "mnpt/figures.hpp"
#include "mnpt/magnetization.hpp"
#include "mnpt/plan.hpp"
#include "mnpt/scenario.hpp"

namespace py = pybind11;
using namespace mnpt;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(py::ssize_t(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ScenarioConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    ScenarioConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_scenario(path);
}

py::dict estimate_dict(const TemperatureEstimate& e) {
  py::dict d;
  d["valid"] = e.valid;
  d["reason"] = e.reason;
  d["T_est"] = e.T_est;
  d["tau_est"] = e.tau_est;
  d["phi_H"] = e.phi_H;
  d["phi_plus"] = e.phi_plus;
  d["phi_minus"] = e.phi_minus;
  return d;
}

py::dict table_dict(const CsvTable& t) {
  py::dict d;
  d["columns"] = t.columns;
  d["rows"] = t.rows;
  d["preamble"] = t.preamble;
  d["trailer"] = t.trailer;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Magnetic nanoparticle thermometry core";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<EstimationError>(m, "EstimationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<ParticleSpec>(m, "ParticleSpec")
      .def(py::init<>())
      .def_readwrite("d_core", &ParticleSpec::d_core)
      .def_readwrite("d_hydro", &ParticleSpec::d_hydro)
      .def_readwrite("K_aniso", &ParticleSpec::K_aniso)
      .def_readwrite("Ms_bulk", &ParticleSpec::Ms_bulk)
      .def_readwrite("moment", &ParticleSpec::moment)
      .def_readwrite("N_conc", &ParticleSpec::N_conc)
      .def_readwrite("eta", &ParticleSpec::eta)
      .def_readwrite("tau0", &ParticleSpec::tau0)
      .def_property_readonly("m_s", &ParticleSpec::m_s)
      .def_property_readonly("saturation", &ParticleSpec::saturation)
      .def("validate", &ParticleSpec::validate);

  py::class_<FieldConfig>(m, "FieldConfig")
      .def(py::init<std::int64_t, std::int64_t, double, double>(), py::arg("f_high"), py::arg("f_low"),
           py::arg("B_high"), py::arg("B_low"))
      .def_property_readonly("f_high", &FieldConfig::f_high)
      .def_property_readonly("f_low", &FieldConfig::f_low)
      .def_property_readonly("f_base", &FieldConfig::f_base)
      .def_property_readonly("B_high", &FieldConfig::B_high)
      .def_property_readonly("B_low", &FieldConfig::B_low)
      .def("field_at", &FieldConfig::field_at)
      .def("with_phases", &FieldConfig::with_phases);

  m.def("langevin", &langevin, py::arg("xi"));
  m.def("xi_parameter", &xi_parameter, py::arg("particle"), py::arg("B_amp"), py::arg("T"));
  m.def("tau_brownian", &tau_brownian, py::arg("d_hydro"), py::arg("eta"), py::arg("T"));
  m.def("tau_particle", &tau_particle, py::arg("particle"), py::arg("T"));
  m.def(
      "debye_response",
      [](double omega, double tau) {
        const auto r = debye_response(omega, tau);
        return py::make_tuple(r.attenuation, r.phase);
      },
      py::arg("omega"), py::arg("tau"), "(attenuation, phase lag in rad)");
  m.def("tau_from_phase", &tau_from_phase, py::arg("phi_H"), py::arg("f_H"));
  m.def("phi_H_from_mixing", &phi_H_from_mixing, py::arg("phi_plus"), py::arg("phi_minus"));

  m.def(
      "fourier_coefficients",
      [](const FieldConfig& field, const ParticleSpec& p, double T, int n_max) {
        const auto h = fourier_coefficients(field, p, T, n_max);
        std::vector<double> n, a, b, f;
        for (const auto& l : h.lines) {
          n.push_back(l.n);
          a.push_back(l.a);
          b.push_back(l.b);
          f.push_back(l.frequency);
        }
        py::dict d;
        d["n"] = to_array(n);
        d["a"] = to_array(a);
        d["b"] = to_array(b);
        d["frequency"] = to_array(f);
        d["f_base"] = h.f_base;
        return d;
      },
      py::arg("field"), py::arg("particle"), py::arg("T"), py::arg("n_max") = 0);

  m.def(
      "check_plan",
      [](std::int64_t f_high, std::int64_t f_low, double sample_rate, std::int64_t mains, int window) {
        const auto r = check_plan(f_high, f_low, sample_rate, mains, window);
        py::dict d;
        d["valid"] = r.valid();
        d["f_plus"] = r.plan.f_plus;
        d["f_minus"] = r.plan.f_minus;
        d["f_base"] = r.plan.f_base;
        std::vector<std::string> v;
        for (auto x : r.violations) v.push_back(to_string(x));
        d["violations"] = v;
        return d;
      },
      py::arg("f_high"), py::arg("f_low"), py::arg("sample_rate") = 500e3, py::arg("mains") = 50,
      py::arg("window_periods") = 10);

  py::class_<MeasurementChannels>(m, "Channels")
      .def_property_readonly("diff_background",
                             [](const MeasurementChannels& c) { return to_array(c.diff_background.samples); })
      .def_property_readonly("diff_sample",
                             [](const MeasurementChannels& c) { return to_array(c.diff_sample.samples); })
      .def_property_readonly("ref_A", [](const MeasurementChannels& c) { return to_array(c.ref_A.samples); })
      .def_property_readonly("sample_rate", [](const MeasurementChannels& c) { return c.diff_sample.sample_rate; })
      .def_readonly("f_base", &MeasurementChannels::f_base)
      .def_readonly("noise_sigma", &MeasurementChannels::noise_sigma);

  m.def(
      "simulate_channels",
      [](double T, std::optional<double> ambient, std::optional<double> snr_db, std::optional<std::uint64_t> seed,
         const std::string& config) {
        auto cfg = config_or_default(config);
        if (snr_db) cfg.chain.noise.snr_db = *snr_db;
        cfg.chain.noise.seed = seed.value_or(cfg.seed);
        if (cfg.fixed_background) cfg.chain.background_ambient = cfg.ambient.baseline;
        return simulate_channels(cfg.field, cfg.particle, T, cfg.chain, ambient.value_or(cfg.ambient.baseline));
      },
      py::arg("T"), py::arg("ambient") = py::none(), py::arg("snr_db") = py::none(), py::arg("seed") = py::none(),
      py::arg("config") = "");

  m.def(
      "estimate",
      [](const MeasurementChannels& ch, const std::string& config, const std::string& mode,
         const std::string& reference, std::optional<double> A, std::optional<double> B) {
        auto cfg = config_or_default(config);
        cfg.estimator.mode = parse_estimator_mode(mode);
        cfg.estimator.reference = parse_reference_mode(reference);
        CalibrationModel cal;
        if (A) {
          cal = CalibrationModel::from_constant(*A);
          if (B) {
            cal.kind = CalibrationModel::Kind::AffineInInverseTau;
            cal.B = *B;
          }
        } else {
          cal = calibrate_scenario(cfg);
        }
        return estimate_dict(estimate_temperature(ch, cfg.plan(), cfg.chain.amplifier, cal, cfg.estimator));
      },
      py::arg("channels"), py::arg("config") = "", py::arg("mode") = "mixing", py::arg("reference") = "fundamental",
      py::arg("A") = py::none(), py::arg("B") = py::none());

  m.def(
      "run_scenario",
      [](const std::string& config, std::optional<std::uint64_t> seed, std::optional<int> trials,
         std::optional<std::string> mode) {
        auto cfg = load_scenario(config);
        if (seed) cfg.seed = *seed;
        if (trials) cfg.trials = *trials;
        if (mode) cfg.estimator.mode = parse_estimator_mode(*mode);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg);
        }
        const auto s = r.summary();
        py::dict d;
        d["table"] = table_dict(to_table(r));
        d["max_abs_error"] = s.max_abs_error;
        d["mean_error"] = s.mean_error;
        d["std_error"] = s.std_error;
        d["n"] = s.n;
        d["n_valid"] = s.n_valid;
        return d;
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("trials") = py::none(), py::arg("mode") = py::none());

  m.def("figure_ids", &figure_ids);
  m.def(
      "figure",
      [](const std::string& id, std::uint64_t seed, int trials) {
        FigureOptions o;
        o.seed = seed;
        o.trials = trials;
        CsvTable t;
        {
          py::gil_scoped_release release;
          t = generate_figure(id, o);
        }
        return table_dict(t);
      },
      py::arg("id"), py::arg("seed") = 1, py::arg("trials") = 200);
}
