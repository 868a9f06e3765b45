#pragma once

// Domain types shared by every module: spins on S^2, ensembles of spins with
// their Larmor frequencies and weights, the weighted l1 metric, and seeded
// sampling of ensembles.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace blochstab {

using Vec3 = Eigen::Vector3d;

/// Tolerance on | |X| - 1 | that every SpinState is guaranteed to satisfy.
inline constexpr double kUnitNormTolerance = 1e-9;

/// A magnetization vector on the unit sphere.
class SpinState {
 public:
  SpinState() : v_(0.0, 0.0, -1.0) {}

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  const Vec3& vec() const { return v_; }

  /// Wraps a vector the caller knows to be on the sphere (integrator output).
  /// No normalization takes place.
  static SpinState from_unit(const Vec3& v) { return SpinState(v); }

  friend bool operator==(const SpinState& a, const SpinState& b) {
    return a.v_ == b.v_;
  }

 private:
  explicit SpinState(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Scales (x, y, z) to unit length. Throws std::invalid_argument on the zero
/// vector or non-finite input.
SpinState make_spin(double x, double y, double z);
SpinState make_spin(const Vec3& v);

struct ControlValue {
  double u1 = 0.0;
  double u2 = 0.0;
  friend bool operator==(const ControlValue&, const ControlValue&) = default;
};

/// Frequencies e_i, weights w_i and one spin per frequency, aligned by index.
/// The constructor enforces equal lengths, positive weights, finite
/// frequencies and the unit-norm invariant on every spin.
class EnsembleState {
 public:
  EnsembleState() = default;
  EnsembleState(std::vector<double> freqs, std::vector<double> weights,
                std::vector<SpinState> spins);

  std::size_t size() const { return spins_.size(); }
  const std::vector<double>& freqs() const { return freqs_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<SpinState>& spins() const { return spins_; }
  const SpinState& spin(std::size_t i) const { return spins_.at(i); }

  /// Same frequencies and weights, new spins.
  EnsembleState with_spins(std::vector<SpinState> spins) const;

  /// Smallest pairwise gap |e_i - e_j|; +inf for a single spin.
  double min_frequency_gap() const;

  friend bool operator==(const EnsembleState&, const EnsembleState&) = default;

 private:
  std::vector<double> freqs_;
  std::vector<double> weights_;
  std::vector<SpinState> spins_;
};

// Weight families -----------------------------------------------------------

std::vector<double> unit_weights(std::size_t p);

/// w_i = base^{-i} for i = 1..p (base 2 gives 2^{-i}, base 1.1 gives 1.1^{-i}).
std::vector<double> geometric_weights(std::size_t p, double base);

bool is_unit_weights(std::span<const double> w);

/// Smallest |e_i - e_j| over i < j, +inf when fewer than two entries.
double min_gap(std::span<const double> freqs);

// Metric ----------------------------------------------------------------------

/// sum_i w_i |X_i - X'_i|. Throws std::invalid_argument when the two states
/// do not share frequencies and weights.
double weighted_distance(const EnsembleState& a, const EnsembleState& b);

// Targets ---------------------------------------------------------------------

/// All spins at (0, 0, sign) with the given frequencies and weights.
EnsembleState target_state(std::vector<double> freqs,
                           std::vector<double> weights, int sign);

/// Convenience overload: frequencies 1..p, unit weights.
EnsembleState target_state(std::size_t p, int sign);

// Random generation -----------------------------------------------------------

/// Portable seeded generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; doubles are formed from the top 53 bits
/// so values do not depend on the standard library's distributions.
///
/// Streams: Rng(seed, stream) seeds the engine with splitmix64(seed ^
/// splitmix64(stream + 1)), so sample k of a Monte-Carlo sweep uses stream k
/// and is independent of how samples are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Spin with z uniform in [zlo, zhi] and (x, y) uniform on the circle of
/// radius sqrt(1 - z^2). With [zlo, zhi] = [-1, 1] this is the uniform
/// (Haar) measure on S^2.
SpinState random_spin(Rng& rng, double zlo, double zhi);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Frequencies uniform on [lo, hi) (redrawn on exact collision), spins from
/// random_spin. Deterministic per seed. The weights vector must have length p.
EnsembleState random_ensemble(std::uint64_t seed, std::size_t p,
                              Interval freq_interval, Interval z_range,
                              std::vector<double> weights);

/// Frequencies only, same draw as random_ensemble uses.
std::vector<double> random_frequencies(Rng& rng, std::size_t p,
                                       Interval freq_interval);

}  // namespace blochstab
