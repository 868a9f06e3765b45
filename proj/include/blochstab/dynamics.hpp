#pragma once

// Controlled Bloch vector fields, the feedback laws that close the loop, and
// time integration on the product of spheres.
//
// Per spin i the controlled field is
//   x' = -e_i y + u2 z,   y' = e_i x + u1 z,   z' = -u2 x - u1 y,
// i.e. X' = w_i x X with angular velocity w_i = (-u1, u2, e_i).

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "blochstab/core.hpp"

namespace blochstab {

using TangentCollection = std::vector<Vec3>;

// Control laws ------------------------------------------------------------------

namespace law {
struct Zero {
  friend bool operator==(const Zero&, const Zero&) = default;
};
/// u1 = sum y_i, u2 = sum x_i (unit weights).
struct FullSum {
  friend bool operator==(const FullSum&, const FullSum&) = default;
};
/// u1 = sum w_i y_i, u2 = sum w_i x_i with the ensemble's weights.
struct Weighted {
  friend bool operator==(const Weighted&, const Weighted&) = default;
};
/// Weighted sums over the first n spins only.
struct Truncated {
  std::size_t n = 1;
  friend bool operator==(const Truncated&, const Truncated&) = default;
};
/// Uncontrolled Bloch equation with radiation damping at the given rate.
/// sign = -1 flips the whole right-hand side (inverted static field).
struct RadiationDamping {
  double rate = 1.0;
  int sign = 1;
  friend bool operator==(const RadiationDamping&,
                         const RadiationDamping&) = default;
};
}  // namespace law

using ControlLaw = std::variant<law::Zero, law::FullSum, law::Weighted,
                                law::Truncated, law::RadiationDamping>;

/// Throws std::invalid_argument when the law cannot act on p spins
/// (Truncated n outside [1, p], non-positive damping rate, bad sign).
void validate(const ControlLaw& law, std::size_t p);

/// True for the feedback laws whose Lyapunov function is nonincreasing.
bool is_feedback(const ControlLaw& law);

std::string to_string(const ControlLaw& law);

/// Parses "zero", "fullsum", "weighted", "truncated:N", "rde:RATE:SIGN".
ControlLaw parse_control_law(const std::string& text);

// Fields ------------------------------------------------------------------------

/// Feedback value for the law. For RadiationDamping returns the averages
/// (u1, u2) = (Ybar, Xbar) for reporting only; rde_rhs consumes them itself.
ControlValue control_value(const ControlLaw& law, const EnsembleState& s);
ControlValue control_value(const ControlLaw& law, std::span<const Vec3> spins,
                           std::span<const double> weights);

TangentCollection bloch_rhs(const EnsembleState& s, const ControlValue& u);
void bloch_rhs(std::span<const Vec3> spins, std::span<const double> freqs,
               const ControlValue& u, std::span<Vec3> out);

struct CutoffParams {
  double a = 2.0;  ///< radial clamp on each spin
  double b = 2.0;  ///< clamp on each control component
};

/// Symmetric clamp to [-b, b].
double cutoff_scalar(double x, double b);
/// Radial clamp: w if |w| <= a, else a w / |w|.
Vec3 cutoff_radial(const Vec3& w, double a);

/// Globally Lipschitz extension of the weighted closed-loop field to the
/// ambient product of R^3. Coincides with bloch_rhs on the product of spheres
/// while the clamps are inactive.
TangentCollection cutoff_rhs(std::span<const Vec3> spins,
                             std::span<const double> freqs,
                             std::span<const double> weights,
                             const CutoffParams& params);

/// Radiation damping field. sign = +1:
///   x_i' = -e_i y_i - rate z_i Xbar
///   y_i' =  e_i x_i - rate z_i Ybar
///   z_i' =  rate (x_i Xbar + y_i Ybar)
/// with Xbar, Ybar the ensemble means; sign = -1 negates everything.
TangentCollection rde_rhs(const EnsembleState& s, double rate, int sign);
void rde_rhs(std::span<const Vec3> spins, std::span<const double> freqs,
             double rate, int sign, std::span<Vec3> out);

/// Closed-loop field for any law, evaluated on raw (possibly off-sphere)
/// vectors.
void closed_loop_rhs(const ControlLaw& law, std::span<const Vec3> spins,
                     std::span<const double> freqs,
                     std::span<const double> weights, std::span<Vec3> out);

// Integration ---------------------------------------------------------------------

enum class Method {
  /// Classical RK4 on the closed-loop field, then each spin renormalized.
  Rk4Renormalized,
  /// Feedback frozen at the step start; each spin rotated exactly by
  /// exp(h W_i) (Rodrigues formula).
  LieEulerRodrigues,
};

std::string to_string(Method m);
Method parse_method(const std::string& text);

struct IntegratorConfig {
  Method method = Method::Rk4Renormalized;
  double h = 0.01;
  double t_final = 1.0;
};

void validate(const IntegratorConfig& cfg);

/// Rotation of v by angle |omega| h about omega.
Vec3 rodrigues_rotate(const Vec3& v, const Vec3& omega, double h);

/// One step of size cfg.h.
EnsembleState step(const EnsembleState& s, const ControlLaw& law,
                   const IntegratorConfig& cfg);

/// Sampled closed-loop trajectory. Frequencies and weights are stored once;
/// samples hold the spins.
struct Trajectory {
  std::vector<double> freqs;
  std::vector<double> weights;
  ControlLaw law;
  IntegratorConfig config;
  std::size_t sample_stride = 1;

  std::vector<double> times;
  std::vector<std::vector<SpinState>> spins;
  std::vector<ControlValue> controls;
  std::vector<double> lyapunov;

  // Per-step diagnostics over the whole run, not just the samples.
  double max_norm_drift = 0.0;
  double max_lyapunov_increase = 0.0;  ///< max over steps of V_{k+1} - V_k
  std::size_t steps = 0;

  std::size_t size() const { return times.size(); }
  EnsembleState state_at(std::size_t k) const;
  EnsembleState final_state() const { return state_at(size() - 1); }
};

/// Steps from s0 to cfg.t_final, recording every stride-th step plus the
/// initial and final states. The last step is shortened if t_final is not a
/// multiple of h. Throws std::runtime_error if the state becomes non-finite.
Trajectory integrate(const EnsembleState& s0, const ControlLaw& law,
                     const IntegratorConfig& cfg, std::size_t stride = 100);

}  // namespace blochstab
