#include "blochstab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace blochstab {

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.seed == b.seed && a.p == b.p && a.freq_interval == b.freq_interval &&
         a.frequencies == b.frequencies && a.z0_range == b.z0_range &&
         a.weights == b.weights && a.law == b.law &&
         a.integrator.method == b.integrator.method &&
         a.integrator.h == b.integrator.h &&
         a.integrator.t_final == b.integrator.t_final && a.stride == b.stride &&
         a.z_threshold == b.z_threshold && a.outputs == b.outputs;
}

std::vector<double> make_weights(const WeightSpec& spec, std::size_t p) {
  return spec.scheme == WeightSpec::Scheme::Unit
             ? unit_weights(p)
             : geometric_weights(p, spec.base);
}

void validate(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  const auto fail = [&](const std::string& field, const std::string& what) {
    errors.push_back(field + ": " + what);
  };
  if (cfg.p < 1) fail("ensemble.p", "must be >= 1");
  if (!cfg.frequencies.empty() && cfg.frequencies.size() != cfg.p) {
    fail("ensemble.frequencies", "must list exactly p values");
  }
  if (cfg.frequencies.empty() && !(cfg.freq_interval.lo < cfg.freq_interval.hi)) {
    fail("ensemble.freq_interval", "need lo < hi");
  }
  if (!(cfg.z0_range.lo >= -1.0 && cfg.z0_range.lo <= cfg.z0_range.hi &&
        cfg.z0_range.hi <= 1.0)) {
    fail("ensemble.z0_range", "need -1 <= lo <= hi <= 1");
  }
  if (cfg.weights.scheme == WeightSpec::Scheme::Geometric &&
      !(cfg.weights.base > 1.0)) {
    fail("weights.base", "must be > 1 for geometric weights");
  }
  try {
    validate(cfg.law, cfg.p);
  } catch (const std::invalid_argument& e) {
    fail("law", e.what());
  }
  if (std::holds_alternative<law::FullSum>(cfg.law) &&
      cfg.weights.scheme != WeightSpec::Scheme::Unit) {
    fail("law", "fullsum needs unit weights (use weighted)");
  }
  try {
    validate(cfg.integrator);
  } catch (const std::invalid_argument& e) {
    fail("integrator", e.what());
  }
  if (cfg.stride < 1) fail("integrator.stride", "must be >= 1");
  if (!(cfg.z_threshold > -1.0 && cfg.z_threshold < 1.0)) {
    fail("convergence.z_threshold", "must lie in (-1, 1)");
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

namespace {

Interval read_interval(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() != 2) {
    throw ConfigError(field + ": expected a two-element list [lo, hi]");
  }
  return {n[0].as<double>(), n[1].as<double>()};
}

template <class T>
T read(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field + ": wrong type");
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  ScenarioConfig cfg;
  if (!root || root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");

  static const std::vector<std::string> known = {
      "seed", "ensemble", "weights", "law", "integrator", "convergence", "output"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(key + ": unknown key");
    }
  }

  if (root["seed"]) cfg.seed = read<std::uint64_t>(root["seed"], "seed");
  if (const auto e = root["ensemble"]) {
    if (e["p"]) cfg.p = read<std::size_t>(e["p"], "ensemble.p");
    if (e["freq_interval"]) {
      cfg.freq_interval = read_interval(e["freq_interval"], "ensemble.freq_interval");
    }
    if (e["frequencies"]) {
      cfg.frequencies = read<std::vector<double>>(e["frequencies"], "ensemble.frequencies");
    }
    if (e["z0_range"]) cfg.z0_range = read_interval(e["z0_range"], "ensemble.z0_range");
  }
  if (const auto w = root["weights"]) {
    const auto scheme = w["scheme"] ? read<std::string>(w["scheme"], "weights.scheme")
                                    : std::string("unit");
    if (scheme == "unit") {
      cfg.weights.scheme = WeightSpec::Scheme::Unit;
    } else if (scheme == "geometric") {
      cfg.weights.scheme = WeightSpec::Scheme::Geometric;
    } else {
      throw ConfigError("weights.scheme: expected unit or geometric");
    }
    if (w["base"]) cfg.weights.base = read<double>(w["base"], "weights.base");
  }
  if (root["law"]) {
    try {
      cfg.law = parse_control_law(read<std::string>(root["law"], "law"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("law: ") + e.what());
    }
  }
  if (const auto i = root["integrator"]) {
    if (i["method"]) {
      try {
        cfg.integrator.method = parse_method(read<std::string>(i["method"], "integrator.method"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("integrator.method: ") + e.what());
      }
    }
    if (i["h"]) cfg.integrator.h = read<double>(i["h"], "integrator.h");
    if (i["t_final"]) cfg.integrator.t_final = read<double>(i["t_final"], "integrator.t_final");
    if (i["stride"]) cfg.stride = read<std::size_t>(i["stride"], "integrator.stride");
  }
  if (const auto c = root["convergence"]) {
    if (c["z_threshold"]) {
      cfg.z_threshold = read<double>(c["z_threshold"], "convergence.z_threshold");
    }
  }
  if (const auto o = root["output"]) {
    if (o["trajectory_csv"]) cfg.outputs.trajectory_csv = read<std::string>(o["trajectory_csv"], "output.trajectory_csv");
    if (o["summary"]) cfg.outputs.summary = read<std::string>(o["summary"], "output.summary");
    if (o["svg"]) cfg.outputs.svg = read<std::string>(o["svg"], "output.svg");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

// Emits a double so that YAML::Node::as<double>() reads back the same value.
YAML::Emitter& emit_double(YAML::Emitter& out, double v) {
  return out << YAML::Value << format_double(v);
}

}  // namespace

std::string to_yaml(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (cfg.seed) out << YAML::Key << "seed" << YAML::Value << *cfg.seed;

  out << YAML::Key << "ensemble" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "p" << YAML::Value << cfg.p;
  out << YAML::Key << "freq_interval" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << format_double(cfg.freq_interval.lo) << format_double(cfg.freq_interval.hi)
      << YAML::EndSeq;
  if (!cfg.frequencies.empty()) {
    out << YAML::Key << "frequencies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double f : cfg.frequencies) out << format_double(f);
    out << YAML::EndSeq;
  }
  out << YAML::Key << "z0_range" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << format_double(cfg.z0_range.lo) << format_double(cfg.z0_range.hi)
      << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "weights" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "scheme" << YAML::Value
      << (cfg.weights.scheme == WeightSpec::Scheme::Unit ? "unit" : "geometric");
  out << YAML::Key << "base";
  emit_double(out, cfg.weights.base);
  out << YAML::EndMap;

  out << YAML::Key << "law" << YAML::Value << to_string(cfg.law);

  out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value << to_string(cfg.integrator.method);
  out << YAML::Key << "h";
  emit_double(out, cfg.integrator.h);
  out << YAML::Key << "t_final";
  emit_double(out, cfg.integrator.t_final);
  out << YAML::Key << "stride" << YAML::Value << cfg.stride;
  out << YAML::EndMap;

  out << YAML::Key << "convergence" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "z_threshold";
  emit_double(out, cfg.z_threshold);
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "trajectory_csv" << YAML::Value << cfg.outputs.trajectory_csv;
  out << YAML::Key << "summary" << YAML::Value << cfg.outputs.summary;
  out << YAML::Key << "svg" << YAML::Value << cfg.outputs.svg;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

EnsembleState materialize(const ScenarioConfig& cfg) {
  validate(cfg);
  if (!cfg.seed) {
    throw ConfigError("seed: a seed is required for randomized scenarios");
  }
  auto weights = make_weights(cfg.weights, cfg.p);
  EnsembleState s = random_ensemble(*cfg.seed, cfg.p, cfg.freq_interval,
                                    cfg.z0_range, weights);
  if (!cfg.frequencies.empty()) {
    s = EnsembleState(cfg.frequencies, std::move(weights), s.spins());
  }
  return s;
}

int target_pole(const ControlLaw& law) {
  if (const auto* r = std::get_if<law::RadiationDamping>(&law)) return r->sign;
  return -1;
}

namespace {

// Earliest sample time after which every spin stays on the target side of
// level (z < -level for pole -1, z > level for pole +1).
std::optional<double> settling_time_towards(const Trajectory& traj, int pole,
                                            double level) {
  std::optional<double> t;
  for (std::size_t k = traj.size(); k-- > 0;) {
    const bool inside = std::all_of(
        traj.spins[k].begin(), traj.spins[k].end(),
        [&](const SpinState& s) { return pole * s.z() > level; });
    if (!inside) break;
    t = traj.times[k];
  }
  return t;
}

}  // namespace

RunSummary summarize(const Trajectory& traj, double threshold) {
  RunSummary s;
  s.law = to_string(traj.law);
  s.final_lyapunov = traj.lyapunov.back();
  for (const auto& sp : traj.spins.back()) s.final_spins.push_back(sp.vec());
  s.max_norm_drift = traj.max_norm_drift;
  s.max_lyapunov_increase = traj.max_lyapunov_increase;
  s.target_pole = target_pole(traj.law);
  const EnsembleState fin = traj.final_state();
  if (converged_down(fin, -threshold)) {
    s.reached_pole = -1;
  } else if (converged_up(fin, threshold)) {
    s.reached_pole = 1;
  }
  s.converged = s.reached_pole == s.target_pole;
  s.settling_time_0p9 = settling_time_towards(traj, s.target_pole, 0.9);
  s.steps = traj.steps;
  s.samples = traj.size();
  return s;
}

ScenarioResult simulate(const ScenarioConfig& cfg) {
  const EnsembleState s0 = materialize(cfg);
  const auto start = std::chrono::steady_clock::now();
  Trajectory traj = integrate(s0, cfg.law, cfg.integrator, cfg.stride);
  const auto stop = std::chrono::steady_clock::now();
  RunSummary summary = summarize(traj, -cfg.z_threshold);
  summary.wall_seconds = std::chrono::duration<double>(stop - start).count();
  return {std::move(traj), std::move(summary)};
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file " + path.string());
  return out;
}

RunSummary run_scenario(const ScenarioConfig& cfg) {
  const ScenarioResult res = simulate(cfg);
  if (!cfg.outputs.trajectory_csv.empty()) {
    auto out = open_output(cfg.outputs.trajectory_csv);
    write_trajectory_csv(res.trajectory, out);
  }
  if (!cfg.outputs.summary.empty()) {
    auto out = open_output(cfg.outputs.summary);
    write_summary(res.summary, out);
  }
  if (!cfg.outputs.svg.empty()) {
    auto out = open_output(cfg.outputs.svg);
    write_svg(res.trajectory, out);
  }
  return res.summary;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,u1,u2,V";
  for (std::size_t i = 1; i <= traj.freqs.size(); ++i) {
    os << ",x" << i << ",y" << i << ",z" << i;
  }
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.times[k]) << ',' << format_double(traj.controls[k].u1)
       << ',' << format_double(traj.controls[k].u2) << ','
       << format_double(traj.lyapunov[k]);
    for (const auto& s : traj.spins[k]) {
      os << ',' << format_double(s.x()) << ',' << format_double(s.y()) << ','
         << format_double(s.z());
    }
    os << '\n';
  }
}

void write_summary(const RunSummary& s, std::ostream& os) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "law" << YAML::Value << s.law;
  out << YAML::Key << "converged" << YAML::Value << s.converged;
  out << YAML::Key << "target_pole" << YAML::Value << s.target_pole;
  out << YAML::Key << "reached_pole" << YAML::Value << s.reached_pole;
  out << YAML::Key << "final_V" << YAML::Value << format_double(s.final_lyapunov);
  out << YAML::Key << "max_norm_drift" << YAML::Value << format_double(s.max_norm_drift);
  out << YAML::Key << "max_V_increase" << YAML::Value
      << format_double(s.max_lyapunov_increase);
  out << YAML::Key << "settling_time_0.9" << YAML::Value;
  if (s.settling_time_0p9) {
    out << format_double(*s.settling_time_0p9);
  } else {
    out << YAML::Null;
  }
  out << YAML::Key << "steps" << YAML::Value << s.steps;
  out << YAML::Key << "samples" << YAML::Value << s.samples;
  out << YAML::Key << "wall_seconds" << YAML::Value << format_double(s.wall_seconds);
  out << YAML::Key << "final_spins" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : s.final_spins) {
    out << YAML::Flow << YAML::BeginSeq << format_double(v.x())
        << format_double(v.y()) << format_double(v.z()) << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  os << out.c_str() << '\n';
}

namespace {

struct Panel {
  std::string title;
  std::vector<std::vector<double>> series;
};

void draw_panel(std::ostream& os, const Panel& panel,
                const std::vector<double>& t, double top, double height,
                double width) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : panel.series) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double left = 60.0;
  const double t0 = t.front();
  const double t1 = t.back() > t0 ? t.back() : t0 + 1.0;
  const auto px = [&](double tv) { return left + (tv - t0) / (t1 - t0) * width; };
  const auto py = [&](double v) { return top + (hi - v) / (hi - lo) * height; };

  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width
     << "\" height=\"" << height << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "<text x=\"" << left << "\" y=\"" << top - 6 << "\" font-size=\"13\">"
     << panel.title << "</text>\n";
  os << "<text x=\"4\" y=\"" << top + 12 << "\" font-size=\"10\">"
     << format_double(hi) << "</text>\n";
  os << "<text x=\"4\" y=\"" << top + height << "\" font-size=\"10\">"
     << format_double(lo) << "</text>\n";

  const std::size_t n = t.size();
  const std::size_t step = std::max<std::size_t>(1, n / 2000);
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::size_t colour = 0;
  for (const auto& s : panel.series) {
    os << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\""
       << palette[colour++ % 8] << "\" points=\"";
    for (std::size_t k = 0; k < n; k += step) {
      os << px(t[k]) << ',' << py(s[k]) << ' ';
    }
    os << px(t[n - 1]) << ',' << py(s[n - 1]) << "\"/>\n";
  }
}

}  // namespace

void write_svg(const Trajectory& traj, std::ostream& os) {
  const double width = 800.0;
  const double height = 180.0;
  const std::size_t n = traj.size();
  const double p = static_cast<double>(traj.freqs.size());

  Panel v{"V(t) / p", {std::vector<double>(n)}};
  Panel z{"z_i(t)", std::vector<std::vector<double>>(traj.freqs.size(),
                                                     std::vector<double>(n))};
  Panel u{"u1(t), u2(t)", {std::vector<double>(n), std::vector<double>(n)}};
  for (std::size_t k = 0; k < n; ++k) {
    v.series[0][k] = traj.lyapunov[k] / p;
    for (std::size_t i = 0; i < traj.freqs.size(); ++i) {
      z.series[i][k] = traj.spins[k][i].z();
    }
    u.series[0][k] = traj.controls[k].u1;
    u.series[1][k] = traj.controls[k].u2;
  }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 90
     << "\" height=\"" << 3 * (height + 40) + 20 << "\" font-family=\"sans-serif\">\n";
  double top = 30.0;
  for (const Panel* panel : {&v, &z, &u}) {
    draw_panel(os, *panel, traj.times, top, height, width);
    top += height + 40.0;
  }
  os << "</svg>\n";
}

std::vector<EquilibriumReport> spectrum_table(const std::vector<double>& freqs,
                                              SpectrumSelection which,
                                              const std::vector<int>& pattern) {
  std::vector<EquilibriumReport> out;
  const std::size_t p = freqs.size();
  switch (which) {
    case SpectrumSelection::All:
      for (const auto& q : enumerate_equilibria(p)) out.push_back(spectrum_at(q, freqs));
      break;
    case SpectrumSelection::Down:
      out.push_back(spectrum_at(Equilibrium{std::vector<int>(p, -1)}, freqs));
      break;
    case SpectrumSelection::Up:
      out.push_back(spectrum_at(Equilibrium{std::vector<int>(p, 1)}, freqs));
      break;
    case SpectrumSelection::Pattern:
      out.push_back(spectrum_at(Equilibrium{pattern}, freqs));
      break;
  }
  return out;
}

void write_spectrum_csv(const std::vector<EquilibriumReport>& reports,
                        std::ostream& os) {
  os << "pattern,branch,index,re,im,residual,class,hyperbolic,n_unstable\n";
  for (const auto& rep : reports) {
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
      os << to_string(rep.q) << ','
         << (rep.branches[k] == Branch::Plus ? "K+iE" : "K-iE") << ',' << k << ','
         << format_double(rep.eigenvalues[k].real()) << ','
         << format_double(rep.eigenvalues[k].imag()) << ','
         << format_double(std::abs(rep.residuals[k])) << ','
         << to_string(rep.classification) << ',' << (rep.hyperbolic ? 1 : 0)
         << ',' << rep.n_unstable << '\n';
    }
  }
}

void write_basin_csv(const BasinEstimate& est, std::ostream& os) {
  os << "sample,max_final_z,final_V,converged\n";
  for (const auto& s : est.outcomes) {
    os << s.index << ',' << format_double(s.max_final_z) << ','
       << format_double(s.final_lyapunov) << ',' << (s.converged ? 1 : 0) << '\n';
  }
}

void write_basin_summary(const BasinEstimate& est, std::ostream& os) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "samples" << YAML::Value << est.samples;
  out << YAML::Key << "converged" << YAML::Value << est.converged;
  out << YAML::Key << "fraction" << YAML::Value << format_double(est.fraction);
  out << YAML::Key << "z_threshold" << YAML::Value << format_double(est.z_threshold);
  out << YAML::Key << "horizon" << YAML::Value << format_double(est.horizon);
  out << YAML::EndMap;
  os << out.c_str() << '\n';
}

void write_schedule_csv(const ConvergenceSchedule& sched, std::ostream& os) {
  os << "# epsilon=" << format_double(sched.epsilon) << " n_bar=" << sched.n_bar
     << '\n';
  os << "N,t_hit,converged,tail_distance\n";
  for (const auto& e : sched.entries) {
    os << e.n << ',' << (e.hitting_time ? format_double(*e.hitting_time) : "")
       << ',' << (e.converged() ? 1 : 0) << ',' << format_double(e.tail_distance)
       << '\n';
  }
}

std::vector<FourierRow> fourier_comparison(const EnsembleState& s0,
                                           double horizon, double h,
                                           const std::vector<double>& extra_omegas) {
  std::vector<double> omegas;
  std::vector<std::complex<double>> cf, cg;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < s0.size(); ++i) {
    const BohrCoefficients c = bohr_fourier_closed(s0, i);
    omegas.insert(omegas.end(), {s0.freqs()[i], -s0.freqs()[i]});
    cf.insert(cf.end(), {c.f_plus, c.f_minus});
    cg.insert(cg.end(), {c.g_plus, c.g_minus});
    index.insert(index.end(), {i, i});
  }
  for (double omega : extra_omegas) {
    omegas.push_back(omega);
    cf.emplace_back(0.0);
    cg.emplace_back(0.0);
    index.push_back(std::string::npos);
  }
  const BohrSweep sweep = bohr_fourier_sweep(s0, omegas, horizon, h);
  std::vector<FourierRow> rows(omegas.size());
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    auto& row = rows[k];
    row.index = index[k];
    row.omega = omegas[k];
    row.closed_f = cf[k];
    row.closed_g = cg[k];
    row.numeric_f = sweep.f[k];
    row.numeric_g = sweep.g[k];
    row.error = std::max(std::abs(sweep.f[k] - cf[k]), std::abs(sweep.g[k] - cg[k]));
    row.accuracy_warning = sweep.accuracy_warning[k];
  }
  return rows;
}

void write_fourier_csv(const std::vector<FourierRow>& rows, std::ostream& os) {
  os << "spin,omega,closed_f_re,closed_f_im,numeric_f_re,numeric_f_im,"
        "closed_g_re,closed_g_im,numeric_g_re,numeric_g_im,error,warning\n";
  for (const auto& r : rows) {
    if (r.index == std::string::npos) {
      os << "probe";
    } else {
      os << r.index + 1;
    }
    os << ',' << format_double(r.omega) << ',' << format_double(r.closed_f.real())
       << ',' << format_double(r.closed_f.imag()) << ','
       << format_double(r.numeric_f.real()) << ','
       << format_double(r.numeric_f.imag()) << ','
       << format_double(r.closed_g.real()) << ','
       << format_double(r.closed_g.imag()) << ','
       << format_double(r.numeric_g.real()) << ','
       << format_double(r.numeric_g.imag()) << ',' << format_double(r.error)
       << ',' << (r.accuracy_warning ? 1 : 0) << '\n';
  }
}

}  // namespace blochstab
