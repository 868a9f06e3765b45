#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blochstab/analysis.hpp"
#include "blochstab/experiment.hpp"
#include "blochstab/spectral.hpp"

namespace py = pybind11;
using namespace blochstab;

namespace {

py::array_t<double> spins_array(const std::vector<SpinState>& spins) {
  py::array_t<double> out({spins.size(), std::size_t{3}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < spins.size(); ++i) {
    for (int c = 0; c < 3; ++c) a(i, c) = spins[i].vec()[c];
  }
  return out;
}

EnsembleState state_from(std::vector<double> freqs, std::vector<double> weights,
                         const py::array_t<double, py::array::c_style | py::array::forcecast>& xyz) {
  if (xyz.ndim() != 2 || xyz.shape(1) != 3) {
    throw std::invalid_argument("spins must have shape (p, 3)");
  }
  auto a = xyz.unchecked<2>();
  std::vector<SpinState> spins;
  for (py::ssize_t i = 0; i < a.shape(0); ++i) spins.push_back(make_spin(a(i, 0), a(i, 1), a(i, 2)));
  return EnsembleState(std::move(freqs), std::move(weights), std::move(spins));
}

py::dict trajectory_dict(const Trajectory& t) {
  const std::size_t n = t.size();
  const std::size_t p = t.freqs.size();
  py::array_t<double> times(n), u1(n), u2(n), v(n);
  py::array_t<double> spins({n, p, std::size_t{3}});
  auto s = spins.mutable_unchecked<3>();
  for (std::size_t k = 0; k < n; ++k) {
    times.mutable_at(k) = t.times[k];
    u1.mutable_at(k) = t.controls[k].u1;
    u2.mutable_at(k) = t.controls[k].u2;
    v.mutable_at(k) = t.lyapunov[k];
    for (std::size_t i = 0; i < p; ++i) {
      for (int c = 0; c < 3; ++c) s(k, i, c) = t.spins[k][i].vec()[c];
    }
  }
  py::dict d;
  d["t"] = times;
  d["u1"] = u1;
  d["u2"] = u2;
  d["V"] = v;
  d["spins"] = spins;
  d["max_norm_drift"] = t.max_norm_drift;
  d["max_lyapunov_increase"] = t.max_lyapunov_increase;
  d["steps"] = t.steps;
  return d;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["law"] = s.law;
  d["final_V"] = s.final_lyapunov;
  d["max_norm_drift"] = s.max_norm_drift;
  d["max_lyapunov_increase"] = s.max_lyapunov_increase;
  d["converged"] = s.converged;
  d["target_pole"] = s.target_pole;
  d["reached_pole"] = s.reached_pole;
  d["settling_time_0.9"] = s.settling_time_0p9 ? py::cast(*s.settling_time_0p9) : py::none();
  d["steps"] = s.steps;
  d["samples"] = s.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bloch-ensemble feedback stabilization core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<EnsembleState>(m, "Ensemble")
      .def(py::init(&state_from), py::arg("freqs"), py::arg("weights"), py::arg("spins"))
      .def_property_readonly("freqs", &EnsembleState::freqs)
      .def_property_readonly("weights", &EnsembleState::weights)
      .def_property_readonly("spins", [](const EnsembleState& s) { return spins_array(s.spins()); })
      .def_property_readonly("min_frequency_gap", &EnsembleState::min_frequency_gap)
      .def("__len__", &EnsembleState::size)
      .def("__eq__", [](const EnsembleState& a, const EnsembleState& b) { return a == b; });

  m.def("unit_weights", &unit_weights, py::arg("p"));
  m.def("geometric_weights", &geometric_weights, py::arg("p"), py::arg("base"));
  m.def(
      "random_ensemble",
      [](std::uint64_t seed, std::size_t p, std::pair<double, double> freq,
         std::pair<double, double> z0, std::optional<std::vector<double>> weights) {
        return random_ensemble(seed, p, {freq.first, freq.second}, {z0.first, z0.second},
                               weights ? *weights : unit_weights(p));
      },
      py::arg("seed"), py::arg("p"), py::arg("freq_interval") = std::pair{1.0, 4.0},
      py::arg("z0_range") = std::pair{-1.0, 1.0}, py::arg("weights") = py::none());
  m.def(
      "target_state",
      [](std::vector<double> f, std::vector<double> w, int sign) {
        return target_state(std::move(f), std::move(w), sign);
      },
      py::arg("freqs"), py::arg("weights"), py::arg("sign") = -1);
  m.def("distance", &weighted_distance, py::arg("a"), py::arg("b"));
  m.def("lyapunov", py::overload_cast<const EnsembleState&>(&lyapunov), py::arg("state"));

  m.def(
      "integrate",
      [](const EnsembleState& s0, const std::string& law, const std::string& method, double h,
         double t_final, std::size_t stride) {
        const auto l = parse_control_law(law);
        validate(l, s0.size());
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = integrate(s0, l, {parse_method(method), h, t_final}, stride);
        }
        return trajectory_dict(t);
      },
      py::arg("state"), py::arg("law") = "fullsum", py::arg("method") = "rk4",
      py::arg("h") = 0.01, py::arg("t_final") = 1.0, py::arg("stride") = 100);

  m.def(
      "simulate_config",
      [](const std::string& yaml_text) {
        const auto cfg = parse_config(yaml_text);
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = simulate(cfg);
        }
        py::dict out = summary_dict(r.summary);
        out["trajectory"] = trajectory_dict(r.trajectory);
        return out;
      },
      py::arg("yaml_text"), "Parse a scenario config (YAML text) and integrate it.");

  m.def(
      "spectrum",
      [](const std::vector<double>& freqs, const std::vector<int>& signs) {
        const auto rep = spectrum_at(Equilibrium{signs}, freqs);
        py::dict d;
        d["eigenvalues"] = rep.eigenvalues;
        d["residuals"] = rep.residuals;
        d["classification"] = to_string(rep.classification);
        d["n_unstable"] = rep.n_unstable;
        d["n_stable"] = rep.n_stable;
        d["hyperbolic"] = rep.hyperbolic;
        d["near_degenerate"] = rep.near_degenerate;
        return d;
      },
      py::arg("freqs"), py::arg("signs"));
  m.def("vandermonde_det", &vandermonde_det, py::arg("freqs"));

  m.def(
      "bohr_closed",
      [](const EnsembleState& s0, std::size_t i) {
        const auto c = bohr_fourier_closed(s0, i);
        return py::make_tuple(c.f_plus, c.f_minus, c.g_plus, c.g_minus);
      },
      py::arg("state"), py::arg("index"),
      "Closed-form (a(f,e_i), a(f,-e_i), a(g,e_i), a(g,-e_i)).");
  m.def(
      "bohr_numeric",
      [](const EnsembleState& s0, const std::vector<double>& omegas, double horizon, double h) {
        BohrSweep sw;
        {
          py::gil_scoped_release release;
          sw = bohr_fourier_sweep(s0, omegas, horizon, h);
        }
        return py::make_tuple(sw.f, sw.g);
      },
      py::arg("state"), py::arg("omegas"), py::arg("horizon"), py::arg("h") = 0.05);

  m.def(
      "basin",
      [](std::vector<double> freqs, std::vector<double> weights, std::size_t samples,
         double horizon, std::uint64_t seed, double z_threshold) {
        BasinConfig cfg;
        cfg.freqs = std::move(freqs);
        cfg.weights = std::move(weights);
        cfg.samples = samples;
        cfg.horizon = horizon;
        cfg.seed = seed;
        cfg.z_threshold = z_threshold;
        BasinEstimate est;
        {
          py::gil_scoped_release release;
          est = basin_monte_carlo(cfg);
        }
        return py::make_tuple(est.converged, est.samples, est.fraction);
      },
      py::arg("freqs"), py::arg("weights"), py::arg("samples"), py::arg("horizon"),
      py::arg("seed"), py::arg("z_threshold") = -0.99);
}
