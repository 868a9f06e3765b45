#pragma once

// Lyapunov diagnostics, almost-periodic (Bohr) Fourier coefficients of the
// free dynamics, omega-limit estimates, convergence schedules for truncated
// feedback and Monte-Carlo basin estimates.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blochstab/core.hpp"
#include "blochstab/dynamics.hpp"

namespace blochstab {

// Lyapunov ------------------------------------------------------------------------

/// V = sum_i w_i z_i with the state's own weights.
double lyapunov(const EnsembleState& s);

/// V in the weight convention of the law: FullSum requires unit weights,
/// Truncated(n) sums the first n terms only, every other law uses all terms.
/// Throws std::invalid_argument on a convention mismatch.
double lyapunov(const ControlLaw& law, const EnsembleState& s);
double lyapunov(const ControlLaw& law, std::span<const Vec3> spins,
                std::span<const double> weights);

/// Analytic dV/dt along the field of `law`: -u1^2 - u2^2 for the feedback
/// laws, 0 for Zero, and sign * rate * p * (Xbar^2 + Ybar^2) (unweighted V)
/// for radiation damping.
double lyapunov_rate(const EnsembleState& s, const ControlLaw& law);

struct LyapunovTrace {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> rates;
};

LyapunovTrace lyapunov_trace(const Trajectory& traj);

// Bohr-Fourier coefficients ---------------------------------------------------------

/// Coefficients of f(t) = sum w_j x_j(t) and g(t) = sum w_j y_j(t) of the free
/// (zero control) evolution at the frequencies +-e_i.
struct BohrCoefficients {
  std::complex<double> f_plus;   ///< a(f, e_i)
  std::complex<double> f_minus;  ///< a(f, -e_i)
  std::complex<double> g_plus;   ///< a(g, e_i)
  std::complex<double> g_minus;  ///< a(g, -e_i)
};

/// Closed forms: a(f, e_i) = w_i (x_i + i y_i) / 2, a(f, -e_i) = w_i (x_i - i
/// y_i) / 2, a(g, e_i) = w_i (y_i - i x_i) / 2, a(g, -e_i) = w_i (y_i + i x_i)
/// / 2, with x_i, y_i the initial values. With w_i = 2^{-i} (i from 1) the
/// factor w_i / 2 is 2^{-(i+1)}. `index` is zero-based.
BohrCoefficients bohr_fourier_closed(const EnsembleState& s0,
                                     std::size_t index);

struct BohrEstimate {
  std::complex<double> f;
  std::complex<double> g;
  double horizon = 0.0;
  /// Set when the horizon is shorter than 10 * 2 pi / (distance from omega to
  /// the nearest +-e_i other than omega itself).
  bool accuracy_warning = false;
};

/// Trapezoidal estimate of (1/T) int_0^T f(t) e^{-i omega t} dt on the
/// samples of a zero-control trajectory (and likewise for g). Throws
/// std::invalid_argument for any other law.
BohrEstimate bohr_fourier_numeric(const Trajectory& traj, double omega);

struct BohrSweep {
  std::vector<double> omegas;
  std::vector<std::complex<double>> f;
  std::vector<std::complex<double>> g;
  std::vector<bool> accuracy_warning;  ///< same rule as BohrEstimate
  double horizon = 0.0;
  std::size_t steps = 0;
};

/// Streaming variant for long horizons: advances the free system from s0
/// with exact per-step rotations (the Lie integrator at zero control) and
/// accumulates the trapezoidal averages for every omega in one pass, without
/// storing the trajectory. The last step is shortened to land on `horizon`.
BohrSweep bohr_fourier_sweep(const EnsembleState& s0,
                             std::span<const double> omegas, double horizon,
                             double h);

// omega-limit ------------------------------------------------------------------------

struct OmegaLimit {
  std::vector<Vec3> mean;      ///< per-spin mean over the tail window
  double dispersion = 0.0;     ///< max_{t in tail, i} |X_i(t) - mean_i|
  bool in_equilibrium_set = false;
  std::vector<int> signs;      ///< sign of mean z_i
  std::size_t tail_samples = 0;
};

/// Tail window = last ceil(tail_fraction * samples) samples. A run counts as
/// settled in the equilibrium set when dispersion <= 1e-3 and every mean has
/// |x|, |y| <= 1e-3 and |z| >= 1 - 1e-3.
OmegaLimit omega_limit(const Trajectory& traj, double tail_fraction);

// Convergence -----------------------------------------------------------------------

/// Earliest sample time after which every z_i stays below z_level; empty if
/// the final sample is not below it.
std::optional<double> settling_time(const Trajectory& traj, double z_level);

/// All z_i < z_threshold.
bool converged_down(const EnsembleState& s, double z_threshold = -0.99);
/// All z_i > z_threshold.
bool converged_up(const EnsembleState& s, double z_threshold = 0.99);

/// Smallest N >= 1 with 2^{-N+1} < epsilon. Throws for epsilon <= 0.
std::size_t smallest_truncation(double epsilon);

/// First sample time after which d(traj(t), X^-) <= epsilon for every
/// remaining sample; empty if the last sample is outside the ball.
std::optional<double> hitting_time(const Trajectory& traj, double epsilon);

struct ScheduleEntry {
  std::size_t n = 0;
  std::optional<double> hitting_time;
  /// max of d(traj(t), X^-) over samples at or after the hitting time.
  double tail_distance = 0.0;
  bool converged() const { return hitting_time.has_value(); }
};

struct ConvergenceSchedule {
  double epsilon = 0.0;
  std::size_t n_bar = 0;
  std::vector<ScheduleEntry> entries;
  bool all_converged() const;
};

/// Each trajectory must have been produced with a Truncated law; its n labels
/// the entry. Trajectories that never settle in the ball are reported as
/// unconverged.
ConvergenceSchedule convergence_schedule(std::span<const Trajectory> family,
                                         double epsilon);

/// Runs Truncated(n) from s0 for n = n_min..n_max. Runs are independent and
/// execute concurrently.
std::vector<Trajectory> truncated_family(const EnsembleState& s0,
                                         std::size_t n_min, std::size_t n_max,
                                         const IntegratorConfig& cfg,
                                         std::size_t stride = 100);

// Basin of attraction ----------------------------------------------------------------

struct BasinConfig {
  std::vector<double> freqs;
  std::vector<double> weights;
  std::size_t samples = 100;
  double horizon = 20000.0;
  double z_threshold = -0.99;
  std::uint64_t seed = 0;
  double h = 0.01;
  Method method = Method::Rk4Renormalized;
};

struct BasinSample {
  std::size_t index = 0;
  double max_final_z = 0.0;
  double final_lyapunov = 0.0;
  bool converged = false;
};

struct BasinEstimate {
  std::size_t samples = 0;
  std::size_t converged = 0;
  double fraction = 0.0;
  double z_threshold = 0.0;
  double horizon = 0.0;
  std::vector<BasinSample> outcomes;
};

/// Uniform initial states on (S^2)^p (sample k uses RNG stream k), closed loop
/// with FullSum for unit weights and Weighted otherwise. A sample converges
/// when all z_i(horizon) < z_threshold.
BasinEstimate basin_monte_carlo(const BasinConfig& cfg);

/// Same criterion for a single given initial state.
BasinSample basin_sample(const EnsembleState& s0, const BasinConfig& cfg,
                         std::size_t index = 0);

/// Uniform random initial state used for basin sample k.
EnsembleState basin_initial_state(const BasinConfig& cfg, std::size_t k);

/// Runs f(0..count-1) on a small thread pool; results are indexed by task.
template <class F>
auto parallel_map(std::size_t count, F&& f)
    -> std::vector<decltype(f(std::size_t{}))>;

}  // namespace blochstab

#include "blochstab/detail/parallel.hpp"
