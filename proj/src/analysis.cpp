#include "blochstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace blochstab {

double lyapunov(const EnsembleState& s) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    v += s.weights()[i] * s.spin(i).z();
  }
  return v;
}

double lyapunov(const ControlLaw& law, std::span<const Vec3> spins,
                std::span<const double> weights) {
  if (spins.size() != weights.size()) {
    throw std::invalid_argument("lyapunov: size mismatch");
  }
  std::size_t n = spins.size();
  if (std::holds_alternative<law::FullSum>(law)) {
    if (!is_unit_weights(weights)) {
      throw std::invalid_argument(
          "lyapunov: FullSum feedback requires unit weights (use Weighted)");
    }
  } else if (const auto* t = std::get_if<law::Truncated>(&law)) {
    validate(law, spins.size());
    n = t->n;
  }
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) v += weights[i] * spins[i].z();
  return v;
}

double lyapunov(const ControlLaw& law, const EnsembleState& s) {
  std::vector<Vec3> x;
  x.reserve(s.size());
  for (const auto& sp : s.spins()) x.push_back(sp.vec());
  return lyapunov(law, x, s.weights());
}

double lyapunov_rate(const EnsembleState& s, const ControlLaw& law) {
  (void)lyapunov(law, s);
  const ControlValue u = control_value(law, s);
  if (const auto* r = std::get_if<law::RadiationDamping>(&law)) {
    // Here u holds the means (Ybar, Xbar).
    return r->sign * r->rate * static_cast<double>(s.size()) *
           (u.u1 * u.u1 + u.u2 * u.u2);
  }
  return -u.u1 * u.u1 - u.u2 * u.u2;
}

LyapunovTrace lyapunov_trace(const Trajectory& traj) {
  LyapunovTrace out;
  out.times = traj.times;
  out.values = traj.lyapunov;
  out.rates.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out.rates.push_back(lyapunov_rate(traj.state_at(k), traj.law));
  }
  return out;
}

BohrCoefficients bohr_fourier_closed(const EnsembleState& s0,
                                     std::size_t index) {
  if (index >= s0.size()) {
    throw std::out_of_range("bohr_fourier_closed: index out of range");
  }
  using namespace std::complex_literals;
  const double half_w = 0.5 * s0.weights()[index];
  const double x = s0.spin(index).x();
  const double y = s0.spin(index).y();
  BohrCoefficients c;
  c.f_plus = half_w * (x + 1i * y);
  c.f_minus = half_w * (x - 1i * y);
  c.g_plus = half_w * (y - 1i * x);
  c.g_minus = half_w * (1i * x + y);
  return c;
}

namespace {

bool short_horizon(std::span<const double> freqs, double omega, double horizon) {
  double nearest = std::numeric_limits<double>::infinity();
  for (double e : freqs) {
    for (double freq : {e, -e}) {
      const double d = std::abs(omega - freq);
      if (d > 1e-12) nearest = std::min(nearest, d);
    }
  }
  return std::isfinite(nearest) &&
         horizon < 10.0 * 2.0 * std::numbers::pi / nearest;
}

}  // namespace

BohrEstimate bohr_fourier_numeric(const Trajectory& traj, double omega) {
  if (!std::holds_alternative<law::Zero>(traj.law)) {
    throw std::invalid_argument(
        "bohr_fourier_numeric: trajectory must come from the free (zero "
        "control) system");
  }
  if (traj.size() < 2) {
    throw std::invalid_argument("bohr_fourier_numeric: need >= 2 samples");
  }
  const auto sample = [&](std::size_t k) {
    double f = 0.0;
    double g = 0.0;
    for (std::size_t i = 0; i < traj.weights.size(); ++i) {
      f += traj.weights[i] * traj.spins[k][i].x();
      g += traj.weights[i] * traj.spins[k][i].y();
    }
    const std::complex<double> phase = std::polar(1.0, -omega * traj.times[k]);
    return std::pair{f * phase, g * phase};
  };

  std::complex<double> f_int = 0.0;
  std::complex<double> g_int = 0.0;
  auto prev = sample(0);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const auto cur = sample(k);
    const double dt = traj.times[k] - traj.times[k - 1];
    f_int += 0.5 * dt * (prev.first + cur.first);
    g_int += 0.5 * dt * (prev.second + cur.second);
    prev = cur;
  }
  BohrEstimate est;
  est.horizon = traj.times.back() - traj.times.front();
  est.f = f_int / est.horizon;
  est.g = g_int / est.horizon;
  est.accuracy_warning = short_horizon(traj.freqs, omega, est.horizon);
  return est;
}

BohrSweep bohr_fourier_sweep(const EnsembleState& s0,
                             std::span<const double> omegas, double horizon,
                             double h) {
  if (!(h > 0.0) || !(horizon >= h)) {
    throw std::invalid_argument("bohr_fourier_sweep: need h > 0 and horizon >= h");
  }
  const std::size_t p = s0.size();
  const std::size_t m = omegas.size();
  std::vector<Vec3> x(p);
  for (std::size_t i = 0; i < p; ++i) x[i] = s0.spin(i).vec();
  const auto& w = s0.weights();

  BohrSweep out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.f.assign(m, 0.0);
  out.g.assign(m, 0.0);
  out.horizon = horizon;

  std::vector<std::complex<double>> prev_f(m), prev_g(m), cur_f(m), cur_g(m);
  const auto sample = [&](double t, std::vector<std::complex<double>>& fo,
                          std::vector<std::complex<double>>& go) {
    double f = 0.0;
    double g = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      f += w[i] * x[i].x();
      g += w[i] * x[i].y();
    }
    for (std::size_t j = 0; j < m; ++j) {
      const std::complex<double> phase = std::polar(1.0, -omegas[j] * t);
      fo[j] = f * phase;
      go[j] = g * phase;
    }
  };
  sample(0.0, prev_f, prev_g);

  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  double t = 0.0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t_next = k == n_steps ? horizon : static_cast<double>(k) * h;
    const double dt = t_next - t;
    for (std::size_t i = 0; i < p; ++i) {
      x[i] = rodrigues_rotate(x[i], Vec3(0.0, 0.0, s0.freqs()[i]), dt);
    }
    sample(t_next, cur_f, cur_g);
    for (std::size_t j = 0; j < m; ++j) {
      out.f[j] += 0.5 * dt * (prev_f[j] + cur_f[j]);
      out.g[j] += 0.5 * dt * (prev_g[j] + cur_g[j]);
    }
    std::swap(prev_f, cur_f);
    std::swap(prev_g, cur_g);
    t = t_next;
  }
  out.steps = n_steps;
  for (std::size_t j = 0; j < m; ++j) {
    out.f[j] /= horizon;
    out.g[j] /= horizon;
    out.accuracy_warning.push_back(short_horizon(s0.freqs(), omegas[j], horizon));
  }
  return out;
}

OmegaLimit omega_limit(const Trajectory& traj, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("omega_limit: tail_fraction must be in (0, 1]");
  }
  if (traj.size() == 0) throw std::invalid_argument("omega_limit: empty");
  const std::size_t n = traj.size();
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  const std::size_t first = n - std::min(tail, n);
  const std::size_t p = traj.freqs.size();

  OmegaLimit out;
  out.tail_samples = n - first;
  out.mean.assign(p, Vec3::Zero());
  for (std::size_t k = first; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) out.mean[i] += traj.spins[k][i].vec();
  }
  for (auto& m : out.mean) m /= static_cast<double>(out.tail_samples);

  for (std::size_t k = first; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) {
      out.dispersion = std::max(out.dispersion,
                                (traj.spins[k][i].vec() - out.mean[i]).norm());
    }
  }
  constexpr double tol = 1e-3;
  bool in_set = out.dispersion <= tol;
  out.signs.reserve(p);
  for (const auto& m : out.mean) {
    out.signs.push_back(m.z() >= 0.0 ? 1 : -1);
    in_set = in_set && std::abs(m.x()) <= tol && std::abs(m.y()) <= tol &&
             std::abs(m.z()) >= 1.0 - tol;
  }
  out.in_equilibrium_set = in_set;
  return out;
}

std::optional<double> settling_time(const Trajectory& traj, double z_level) {
  std::optional<double> t;
  for (std::size_t k = traj.size(); k-- > 0;) {
    const auto& spins = traj.spins[k];
    const bool below = std::all_of(spins.begin(), spins.end(),
                                   [&](const SpinState& s) { return s.z() < z_level; });
    if (!below) break;
    t = traj.times[k];
  }
  return t;
}

bool converged_down(const EnsembleState& s, double z_threshold) {
  return std::all_of(s.spins().begin(), s.spins().end(),
                     [&](const SpinState& sp) { return sp.z() < z_threshold; });
}

bool converged_up(const EnsembleState& s, double z_threshold) {
  return std::all_of(s.spins().begin(), s.spins().end(),
                     [&](const SpinState& sp) { return sp.z() > z_threshold; });
}

std::size_t smallest_truncation(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be > 0");
  }
  std::size_t n = 1;
  while (!(std::ldexp(1.0, 1 - static_cast<int>(n)) < epsilon)) ++n;
  return n;
}

namespace {

double distance_to_down(const Trajectory& traj, std::size_t k) {
  const Vec3 down(0.0, 0.0, -1.0);
  double d = 0.0;
  for (std::size_t i = 0; i < traj.weights.size(); ++i) {
    d += traj.weights[i] * (traj.spins[k][i].vec() - down).norm();
  }
  return d;
}

}  // namespace

std::optional<double> hitting_time(const Trajectory& traj, double epsilon) {
  std::optional<double> t;
  for (std::size_t k = traj.size(); k-- > 0;) {
    if (distance_to_down(traj, k) > epsilon) break;
    t = traj.times[k];
  }
  return t;
}

bool ConvergenceSchedule::all_converged() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ScheduleEntry& e) { return e.converged(); });
}

ConvergenceSchedule convergence_schedule(std::span<const Trajectory> family,
                                         double epsilon) {
  ConvergenceSchedule sched;
  sched.epsilon = epsilon;
  sched.n_bar = smallest_truncation(epsilon);
  for (const auto& traj : family) {
    const auto* t = std::get_if<law::Truncated>(&traj.law);
    if (t == nullptr) {
      throw std::invalid_argument(
          "convergence_schedule: every trajectory needs a Truncated law");
    }
    ScheduleEntry entry;
    entry.n = t->n;
    entry.hitting_time = hitting_time(traj, epsilon);
    if (entry.hitting_time) {
      for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.times[k] >= *entry.hitting_time) {
          entry.tail_distance =
              std::max(entry.tail_distance, distance_to_down(traj, k));
        }
      }
    } else {
      entry.tail_distance = distance_to_down(traj, traj.size() - 1);
    }
    sched.entries.push_back(entry);
  }
  std::sort(sched.entries.begin(), sched.entries.end(),
            [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.n < b.n; });
  return sched;
}

std::vector<Trajectory> truncated_family(const EnsembleState& s0,
                                         std::size_t n_min, std::size_t n_max,
                                         const IntegratorConfig& cfg,
                                         std::size_t stride) {
  if (n_min < 1 || n_min > n_max || n_max > s0.size()) {
    std::ostringstream msg;
    msg << "truncated_family: need 1 <= n_min <= n_max <= p (got " << n_min
        << ".." << n_max << ", p = " << s0.size() << ")";
    throw std::invalid_argument(msg.str());
  }
  return parallel_map(n_max - n_min + 1, [&](std::size_t k) {
    return integrate(s0, law::Truncated{n_min + k}, cfg, stride);
  });
}

EnsembleState basin_initial_state(const BasinConfig& cfg, std::size_t k) {
  Rng rng(cfg.seed, k);
  std::vector<SpinState> spins;
  spins.reserve(cfg.freqs.size());
  for (std::size_t i = 0; i < cfg.freqs.size(); ++i) {
    spins.push_back(random_spin(rng, -1.0, 1.0));
  }
  return EnsembleState(cfg.freqs, cfg.weights, std::move(spins));
}

BasinSample basin_sample(const EnsembleState& s0, const BasinConfig& cfg,
                         std::size_t index) {
  const ControlLaw law = is_unit_weights(s0.weights()) ? ControlLaw{law::FullSum{}}
                                                       : ControlLaw{law::Weighted{}};
  IntegratorConfig icfg{cfg.method, cfg.h, cfg.horizon};
  // Only the final state matters; a coarse stride keeps memory flat.
  const auto traj = integrate(s0, law, icfg, 1u << 20);
  const EnsembleState fin = traj.final_state();
  BasinSample out;
  out.index = index;
  out.max_final_z = -1.0;
  for (const auto& s : fin.spins()) out.max_final_z = std::max(out.max_final_z, s.z());
  out.final_lyapunov = traj.lyapunov.back();
  out.converged = converged_down(fin, cfg.z_threshold);
  return out;
}

BasinEstimate basin_monte_carlo(const BasinConfig& cfg) {
  if (cfg.samples < 1) {
    throw std::invalid_argument("basin_monte_carlo: samples must be >= 1");
  }
  if (cfg.freqs.empty() || cfg.freqs.size() != cfg.weights.size()) {
    throw std::invalid_argument(
        "basin_monte_carlo: frequencies and weights must be non-empty and "
        "aligned");
  }
  BasinEstimate est;
  est.samples = cfg.samples;
  est.z_threshold = cfg.z_threshold;
  est.horizon = cfg.horizon;
  est.outcomes = parallel_map(cfg.samples, [&](std::size_t k) {
    return basin_sample(basin_initial_state(cfg, k), cfg, k);
  });
  est.converged = static_cast<std::size_t>(
      std::count_if(est.outcomes.begin(), est.outcomes.end(),
                    [](const BasinSample& s) { return s.converged; }));
  est.fraction = static_cast<double>(est.converged) /
                 static_cast<double>(est.samples);
  return est;
}

}  // namespace blochstab
