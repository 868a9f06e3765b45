#pragma once

// Configuration-driven experiment runner: scenario configs (YAML), run
// summaries, and the CSV / YAML / SVG writers used by the command-line tool.
//
// Trajectory CSV schema: header `t,u1,u2,V,x1,y1,z1,...,xp,yp,zp`, one row
// per sample, 4 + 3p fields per row. Numbers are written in shortest
// round-trip form, so identical runs produce byte-identical files.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochstab/analysis.hpp"
#include "blochstab/core.hpp"
#include "blochstab/dynamics.hpp"
#include "blochstab/spectral.hpp"

namespace blochstab {

/// Invalid configuration; the message lists every offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WeightSpec {
  enum class Scheme { Unit, Geometric };
  Scheme scheme = Scheme::Unit;
  double base = 2.0;  ///< geometric: w_i = base^{-i}
  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

std::vector<double> make_weights(const WeightSpec& spec, std::size_t p);

struct OutputSpec {
  std::string trajectory_csv;  ///< empty: not written
  std::string summary;
  std::string svg;
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ScenarioConfig {
  std::optional<std::uint64_t> seed;
  std::size_t p = 30;
  Interval freq_interval{1.0, 4.0};
  std::vector<double> frequencies;  ///< explicit; overrides the random draw
  Interval z0_range{0.8, 1.0};
  WeightSpec weights;
  ControlLaw law = law::FullSum{};
  IntegratorConfig integrator{Method::Rk4Renormalized, 0.01, 20000.0};
  std::size_t stride = 100;
  double z_threshold = -0.99;
  OutputSpec outputs;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&);
};

/// Throws ConfigError listing every invalid field.
void validate(const ScenarioConfig& cfg);

ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string to_yaml(const ScenarioConfig& cfg);

/// Initial ensemble described by the config (requires a seed).
EnsembleState materialize(const ScenarioConfig& cfg);

/// Pole a run is expected to reach: -1 (X^-) for feedback laws and for
/// inverted radiation damping, +1 (X^+) for radiation damping with sign +1.
int target_pole(const ControlLaw& law);

struct RunSummary {
  std::string law;
  double final_lyapunov = 0.0;
  std::vector<Vec3> final_spins;
  double max_norm_drift = 0.0;
  double max_lyapunov_increase = 0.0;
  bool converged = false;
  int target_pole = -1;
  int reached_pole = 0;  ///< -1, +1, or 0 when neither pole was reached
  std::optional<double> settling_time_0p9;  ///< all z_i beyond -+0.9 to stay
  double wall_seconds = 0.0;
  std::size_t steps = 0;
  std::size_t samples = 0;
};

/// Summary of a finished trajectory. `threshold` is the |z| level (0.99 by
/// default) every spin must pass on the target side for convergence.
RunSummary summarize(const Trajectory& traj, double threshold = 0.99);

struct ScenarioResult {
  Trajectory trajectory;
  RunSummary summary;
};

/// Materializes and integrates without writing files.
ScenarioResult simulate(const ScenarioConfig& cfg);

/// simulate() plus every output file named in cfg.outputs. Throws
/// std::runtime_error when an output cannot be written.
RunSummary run_scenario(const ScenarioConfig& cfg);

// Writers ------------------------------------------------------------------------

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_summary(const RunSummary& s, std::ostream& os);
/// Three panels: V(t), z_i(t), u1/u2(t).
void write_svg(const Trajectory& traj, std::ostream& os);

/// Opens `path` for writing or throws std::runtime_error naming the path.
std::ofstream open_output(const std::filesystem::path& path);

// Spectrum tables -----------------------------------------------------------------

enum class SpectrumSelection { All, Down, Up, Pattern };

std::vector<EquilibriumReport> spectrum_table(
    const std::vector<double>& freqs, SpectrumSelection which,
    const std::vector<int>& pattern = {});

/// Columns: pattern,branch,index,re,im,residual,class,hyperbolic,n_unstable.
void write_spectrum_csv(const std::vector<EquilibriumReport>& reports,
                        std::ostream& os);

// Basin, schedule, Fourier tables ----------------------------------------------------

void write_basin_csv(const BasinEstimate& est, std::ostream& os);
void write_basin_summary(const BasinEstimate& est, std::ostream& os);
void write_schedule_csv(const ConvergenceSchedule& sched, std::ostream& os);

struct FourierRow {
  std::size_t index = 0;  ///< spin index, or npos for an off-frequency probe
  double omega = 0.0;
  std::complex<double> closed_f;
  std::complex<double> numeric_f;
  std::complex<double> closed_g;
  std::complex<double> numeric_g;
  double error = 0.0;  ///< max of the f and g discrepancies
  bool accuracy_warning = false;
};

/// Compares closed-form coefficients at +-e_i with trapezoidal time averages
/// of the free trajectory from s0, and adds probes at `extra_omegas` (where
/// the closed form is zero).
std::vector<FourierRow> fourier_comparison(
    const EnsembleState& s0, double horizon, double h,
    const std::vector<double>& extra_omegas);

void write_fourier_csv(const std::vector<FourierRow>& rows, std::ostream& os);

}  // namespace blochstab
