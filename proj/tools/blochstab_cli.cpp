// blochstab: command-line front end for the experiment runner.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure,
// 3 completed but not converged.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blochstab/analysis.hpp"
#include "blochstab/experiment.hpp"
#include "blochstab/spectral.hpp"

namespace fs = std::filesystem;
using namespace blochstab;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kNotConverged = 3;

// Flags shared by every subcommand; each one overrides the config file.
struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> p;
  std::vector<double> freq_interval;
  std::vector<double> frequencies;
  std::vector<double> z0_range;
  std::string weights;  // "unit" or "geometric"
  std::optional<double> base;
  std::string law;
  std::string method;
  std::optional<double> h;
  std::optional<double> t_final;
  std::optional<std::size_t> stride;
  std::optional<double> z_threshold;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool integrates) {
  app->add_option("--config", c.config, "YAML scenario file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "RNG seed (required unless given in the config)");
  app->add_option("--p", c.p, "number of spins");
  app->add_option("--freq-interval", c.freq_interval, "frequency interval LO HI")
      ->expected(2);
  app->add_option("--frequencies", c.frequencies, "explicit frequencies")
      ->delimiter(',');
  app->add_option("--z0-range", c.z0_range, "initial z interval LO HI")->expected(2);
  app->add_option("--weights", c.weights, "unit | geometric")
      ->check(CLI::IsMember({"unit", "geometric"}));
  app->add_option("--base", c.base, "geometric weight base (> 1)");
  if (integrates) {
    app->add_option("--method", c.method, "rk4 | lie");
    app->add_option("--step", c.h, "step size h");
    app->add_option("--t-final", c.t_final, "final time");
    app->add_option("--stride", c.stride, "sample every STRIDE steps");
    app->add_option("--z-threshold", c.z_threshold, "convergence level for z");
  }
  app->add_flag("--quiet", c.quiet, "do not print the summary");
}

ScenarioConfig build_config(const Common& c, ScenarioConfig cfg) {
  if (!c.config.empty()) cfg = load_config(c.config);
  if (c.seed) cfg.seed = c.seed;
  if (c.p) cfg.p = *c.p;
  if (c.freq_interval.size() == 2) cfg.freq_interval = {c.freq_interval[0], c.freq_interval[1]};
  if (!c.frequencies.empty()) {
    cfg.frequencies = c.frequencies;
    if (!c.p) cfg.p = c.frequencies.size();
  }
  if (c.z0_range.size() == 2) cfg.z0_range = {c.z0_range[0], c.z0_range[1]};
  if (c.weights == "unit") cfg.weights.scheme = WeightSpec::Scheme::Unit;
  if (c.weights == "geometric") cfg.weights.scheme = WeightSpec::Scheme::Geometric;
  if (c.base) cfg.weights.base = *c.base;
  if (!c.law.empty()) {
    try {
      cfg.law = parse_control_law(c.law);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("law: ") + e.what());
    }
  }
  if (!c.method.empty()) {
    try {
      cfg.integrator.method = parse_method(c.method);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("integrator.method: ") + e.what());
    }
  }
  if (c.h) cfg.integrator.h = *c.h;
  if (c.t_final) cfg.integrator.t_final = *c.t_final;
  if (c.stride) cfg.stride = *c.stride;
  if (c.z_threshold) cfg.z_threshold = *c.z_threshold;
  return cfg;
}

void require_seed(const ScenarioConfig& cfg) {
  if (!cfg.seed) throw ConfigError("seed: --seed is required for this command");
}

fs::path resolve(const Common& c, const std::string& configured,
                 const std::string& fallback) {
  const fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
  return p.is_absolute() ? p : fs::path(c.out) / p;
}

std::vector<double> frequencies_of(const ScenarioConfig& cfg) {
  if (!cfg.frequencies.empty()) return cfg.frequencies;
  require_seed(cfg);
  Rng rng(*cfg.seed, 0);
  return random_frequencies(rng, cfg.p, cfg.freq_interval);
}

void print_run(const RunSummary& s) {
  std::cout << "law " << s.law << "  final V/p "
            << format_double(s.final_lyapunov / static_cast<double>(s.final_spins.size()))
            << "  reached pole " << s.reached_pole << " (target " << s.target_pole
            << ")  converged " << (s.converged ? "yes" : "no") << "  max drift "
            << format_double(s.max_norm_drift) << "  wall " << format_double(s.wall_seconds)
            << " s\n";
}

int run_and_write(const Common& c, ScenarioConfig cfg, bool svg) {
  cfg.outputs.trajectory_csv = resolve(c, cfg.outputs.trajectory_csv, "trajectory.csv").string();
  cfg.outputs.summary = resolve(c, cfg.outputs.summary, "summary.yaml").string();
  if (svg || !cfg.outputs.svg.empty()) {
    cfg.outputs.svg = resolve(c, cfg.outputs.svg, "trajectory.svg").string();
  }
  require_seed(cfg);
  const RunSummary s = run_scenario(cfg);
  if (!c.quiet) print_run(s);
  return s.converged ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback stabilization of Bloch-equation ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "blochstab 0.1.0");

  Common c;
  bool svg = false;

  auto* sim = app.add_subcommand("simulate", "integrate one closed-loop scenario");
  add_common(sim, c, true);
  sim->add_option("--law", c.law, "zero | fullsum | weighted | truncated:N | rde:RATE:SIGN");
  sim->add_flag("--svg", svg, "also write trajectory.svg");

  auto* spec = app.add_subcommand("spectrum", "linearization spectra at the equilibria");
  add_common(spec, c, false);
  std::string which = "all";
  std::string pattern;
  spec->add_option("--which", which, "all | down | up | pattern")
      ->check(CLI::IsMember({"all", "down", "up", "pattern"}))
      ->capture_default_str();
  spec->add_option("--pattern", pattern, "sign pattern such as +-- (spin 1 first)");

  auto* basin = app.add_subcommand("basin", "Monte-Carlo basin estimate");
  add_common(basin, c, true);
  std::size_t samples = 100;
  basin->add_option("--samples", samples, "number of initial states")->capture_default_str();

  auto* trunc = app.add_subcommand("truncated", "convergence schedule of truncated feedback");
  add_common(trunc, c, true);
  double eps = 0.05;
  std::optional<std::size_t> n_min;
  std::optional<std::size_t> n_max;
  trunc->add_option("--eps", eps, "ball radius epsilon")->capture_default_str();
  trunc->add_option("--n-min", n_min, "first N (default: smallest admissible)");
  trunc->add_option("--n-max", n_max, "last N (default: p)");

  auto* rde = app.add_subcommand("rde", "radiation-damping dynamics");
  add_common(rde, c, true);
  double rate = 1.0;
  int sign = 1;
  rde->add_option("--rate", rate, "coupling rate")->capture_default_str();
  rde->add_option("--sign", sign, "+1 or -1")->check(CLI::IsMember({1, -1}))->capture_default_str();
  rde->add_flag("--svg", svg, "also write trajectory.svg");

  auto* four = app.add_subcommand("fourier", "closed-form vs numeric Bohr coefficients");
  add_common(four, c, false);
  double horizon = 1000.0;
  double fh = 0.05;
  std::vector<double> probes;
  double tol = 0.02;
  four->add_option("--horizon", horizon, "averaging time T")->capture_default_str();
  four->add_option("--step", fh, "step size of the free trajectory")->capture_default_str();
  four->add_option("--probe", probes, "extra off-spectrum frequencies")->delimiter(',');
  four->add_option("--tol", tol, "largest acceptable discrepancy")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) {
      ScenarioConfig cfg = build_config(c, {});
      return run_and_write(c, cfg, svg);
    }

    if (rde->parsed()) {
      ScenarioConfig cfg = build_config(c, {});
      if (c.config.empty() || rde->count("--rate") || rde->count("--sign") ||
          !std::holds_alternative<law::RadiationDamping>(cfg.law)) {
        cfg.law = law::RadiationDamping{rate, sign};
      }
      if (c.config.empty() && !c.z0_range.size()) cfg.z0_range = {-1.0, 1.0};
      return run_and_write(c, cfg, svg);
    }

    if (spec->parsed()) {
      ScenarioConfig defaults;
      ScenarioConfig cfg = build_config(c, defaults);
      if (c.config.empty() && !c.p && c.frequencies.empty()) cfg.p = 5;
      const auto freqs = frequencies_of(cfg);
      SpectrumSelection sel = SpectrumSelection::All;
      std::vector<int> signs;
      if (which == "down") sel = SpectrumSelection::Down;
      if (which == "up") sel = SpectrumSelection::Up;
      if (which == "pattern") {
        sel = SpectrumSelection::Pattern;
        for (char ch : pattern) {
          if (ch == '+') signs.push_back(1);
          else if (ch == '-') signs.push_back(-1);
          else throw ConfigError("pattern: use only '+' and '-'");
        }
        if (signs.size() != freqs.size()) {
          throw ConfigError("pattern: needs one sign per spin");
        }
      }
      if (sel == SpectrumSelection::All && freqs.size() > kMaxEnumeratedSpins) {
        throw ConfigError("p: at most 20 spins for --which all");
      }
      const auto reports = spectrum_table(freqs, sel, signs);
      auto out = open_output(fs::path(c.out) / "spectrum.csv");
      write_spectrum_csv(reports, out);
      double worst = 0.0;
      bool hyperbolic = true;
      for (const auto& r : reports) {
        worst = std::max(worst, r.max_residual());
        hyperbolic = hyperbolic && r.hyperbolic;
        if (!c.quiet && reports.size() <= 16) {
          std::cout << to_string(r.q) << "  " << to_string(r.classification)
                    << "  unstable " << r.n_unstable << "  min|Re| "
                    << format_double(r.min_abs_real) << '\n';
        }
      }
      if (!c.quiet) {
        std::cout << reports.size() << " equilibria, max residual "
                  << format_double(worst) << (hyperbolic ? "" : ", NON-hyperbolic")
                  << '\n';
      }
      return worst <= 1e-8 && hyperbolic ? kOk : kNotConverged;
    }

    if (basin->parsed()) {
      ScenarioConfig cfg = build_config(c, {});
      require_seed(cfg);
      if (samples == 0) throw ConfigError("samples: must be >= 1");
      validate(cfg);
      BasinConfig bc;
      bc.freqs = frequencies_of(cfg);
      bc.weights = make_weights(cfg.weights, cfg.p);
      bc.samples = samples;
      bc.horizon = cfg.integrator.t_final;
      bc.z_threshold = cfg.z_threshold;
      bc.seed = *cfg.seed;
      bc.h = cfg.integrator.h;
      bc.method = cfg.integrator.method;
      const BasinEstimate est = basin_monte_carlo(bc);
      {
        auto out = open_output(fs::path(c.out) / "basin.csv");
        write_basin_csv(est, out);
      }
      {
        auto out = open_output(fs::path(c.out) / "basin_summary.yaml");
        write_basin_summary(est, out);
      }
      if (!c.quiet) {
        std::cout << est.converged << " / " << est.samples << " converged (fraction "
                  << format_double(est.fraction) << ")\n";
      }
      return kOk;
    }

    if (trunc->parsed()) {
      ScenarioConfig defaults;
      defaults.p = 12;
      defaults.weights = {WeightSpec::Scheme::Geometric, 2.0};
      ScenarioConfig cfg = build_config(c, defaults);
      if (!(eps > 0.0)) throw ConfigError("eps: must be > 0");
      if (cfg.weights.scheme != WeightSpec::Scheme::Geometric || cfg.weights.base != 2.0) {
        throw ConfigError("weights: truncated schedules need geometric weights with base 2");
      }
      cfg.law = law::Weighted{};
      require_seed(cfg);
      const EnsembleState s0 = materialize(cfg);
      const std::size_t lo = n_min.value_or(std::min(smallest_truncation(eps), cfg.p));
      const std::size_t hi = n_max.value_or(cfg.p);
      if (lo < 1 || lo > hi || hi > cfg.p) {
        throw ConfigError("n-min/n-max: need 1 <= n-min <= n-max <= p");
      }
      const auto family = truncated_family(s0, lo, hi, cfg.integrator, cfg.stride);
      const ConvergenceSchedule sched = convergence_schedule(family, eps);
      auto out = open_output(fs::path(c.out) / "schedule.csv");
      write_schedule_csv(sched, out);
      if (!c.quiet) {
        std::cout << "N_bar " << sched.n_bar << '\n';
        for (const auto& e : sched.entries) {
          std::cout << "N=" << e.n << "  t(N,eps) "
                    << (e.hitting_time ? format_double(*e.hitting_time) : "none") << '\n';
        }
      }
      return sched.all_converged() ? kOk : kNotConverged;
    }

    if (four->parsed()) {
      ScenarioConfig defaults;
      defaults.p = 5;
      defaults.z0_range = {-1.0, 1.0};
      defaults.weights = {WeightSpec::Scheme::Geometric, 2.0};
      ScenarioConfig cfg = build_config(c, defaults);
      cfg.law = law::Zero{};
      require_seed(cfg);
      if (!(horizon > 0.0) || !(fh > 0.0)) throw ConfigError("horizon/h: must be > 0");
      const EnsembleState s0 = materialize(cfg);
      const auto rows = fourier_comparison(s0, horizon, fh, probes);
      auto out = open_output(fs::path(c.out) / "fourier.csv");
      write_fourier_csv(rows, out);
      double worst = 0.0;
      for (const auto& r : rows) worst = std::max(worst, r.error);
      if (!c.quiet) {
        std::cout << rows.size() << " coefficients, max discrepancy "
                  << format_double(worst) << '\n';
      }
      return worst <= tol ? kOk : kNotConverged;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
