#include "blochstab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace blochstab {

SpinState make_spin(const Vec3& v) {
  if (!v.allFinite()) {
    throw std::invalid_argument("make_spin: non-finite component");
  }
  const double n = v.norm();
  if (n == 0.0) {
    throw std::invalid_argument("make_spin: cannot normalize the zero vector");
  }
  return SpinState::from_unit(v / n);
}

SpinState make_spin(double x, double y, double z) {
  return make_spin(Vec3(x, y, z));
}

EnsembleState::EnsembleState(std::vector<double> freqs,
                             std::vector<double> weights,
                             std::vector<SpinState> spins)
    : freqs_(std::move(freqs)),
      weights_(std::move(weights)),
      spins_(std::move(spins)) {
  if (freqs_.size() != spins_.size() || weights_.size() != spins_.size()) {
    std::ostringstream msg;
    msg << "EnsembleState: length mismatch (freqs " << freqs_.size()
        << ", weights " << weights_.size() << ", spins " << spins_.size()
        << ")";
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (!std::isfinite(freqs_[i])) {
      throw std::invalid_argument("EnsembleState: non-finite frequency");
    }
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("EnsembleState: weights must be positive");
    }
    if (std::abs(spins_[i].vec().norm() - 1.0) > kUnitNormTolerance) {
      std::ostringstream msg;
      msg << "EnsembleState: spin " << i << " is off the unit sphere (norm "
          << spins_[i].vec().norm() << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

EnsembleState EnsembleState::with_spins(std::vector<SpinState> spins) const {
  return EnsembleState(freqs_, weights_, std::move(spins));
}

double EnsembleState::min_frequency_gap() const { return min_gap(freqs_); }

std::vector<double> unit_weights(std::size_t p) {
  return std::vector<double>(p, 1.0);
}

std::vector<double> geometric_weights(std::size_t p, double base) {
  if (!(base > 1.0)) {
    throw std::invalid_argument("geometric_weights: base must be > 1");
  }
  std::vector<double> w(p);
  double v = 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    v /= base;
    w[i] = v;
  }
  return w;
}

bool is_unit_weights(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [](double v) { return v == 1.0; });
}

double min_gap(std::span<const double> freqs) {
  std::vector<double> sorted(freqs.begin(), freqs.end());
  std::sort(sorted.begin(), sorted.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    gap = std::min(gap, sorted[i] - sorted[i - 1]);
  }
  return gap;
}

double weighted_distance(const EnsembleState& a, const EnsembleState& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("weighted_distance: states differ in length");
  }
  if (a.weights() != b.weights() || a.freqs() != b.freqs()) {
    throw std::invalid_argument(
        "weighted_distance: states must share frequencies and weights");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a.weights()[i] * (a.spin(i).vec() - b.spin(i).vec()).norm();
  }
  return d;
}

EnsembleState target_state(std::vector<double> freqs,
                           std::vector<double> weights, int sign) {
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("target_state: sign must be +1 or -1");
  }
  std::vector<SpinState> spins(freqs.size(),
                               SpinState::from_unit(Vec3(0.0, 0.0, sign)));
  return EnsembleState(std::move(freqs), std::move(weights), std::move(spins));
}

EnsembleState target_state(std::size_t p, int sign) {
  std::vector<double> freqs(p);
  for (std::size_t i = 0; i < p; ++i) freqs[i] = static_cast<double>(i + 1);
  return target_state(std::move(freqs), unit_weights(p), sign);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream + 1))) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

SpinState random_spin(Rng& rng, double zlo, double zhi) {
  if (!(zlo >= -1.0 && zlo <= zhi && zhi <= 1.0)) {
    throw std::invalid_argument("random_spin: need -1 <= zlo <= zhi <= 1");
  }
  const double z = zlo == zhi ? zlo : rng.uniform(zlo, zhi);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return make_spin(r * std::cos(phi), r * std::sin(phi), z);
}

std::vector<double> random_frequencies(Rng& rng, std::size_t p,
                                       Interval freq_interval) {
  if (!(freq_interval.lo < freq_interval.hi)) {
    throw std::invalid_argument("random_frequencies: empty interval");
  }
  std::vector<double> freqs;
  freqs.reserve(p);
  while (freqs.size() < p) {
    const double e = rng.uniform(freq_interval.lo, freq_interval.hi);
    if (std::find(freqs.begin(), freqs.end(), e) == freqs.end()) {
      freqs.push_back(e);
    }
  }
  return freqs;
}

EnsembleState random_ensemble(std::uint64_t seed, std::size_t p,
                              Interval freq_interval, Interval z_range,
                              std::vector<double> weights) {
  if (p < 1) throw std::invalid_argument("random_ensemble: p must be >= 1");
  if (!(z_range.lo >= -1.0 && z_range.lo <= z_range.hi && z_range.hi <= 1.0)) {
    throw std::invalid_argument(
        "random_ensemble: z_range must satisfy -1 <= zlo <= zhi <= 1");
  }
  if (weights.size() != p) {
    throw std::invalid_argument("random_ensemble: weights must have length p");
  }
  Rng freq_rng(seed, 0);
  Rng spin_rng(seed, 1);
  auto freqs = random_frequencies(freq_rng, p, freq_interval);
  std::vector<SpinState> spins;
  spins.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    spins.push_back(random_spin(spin_rng, z_range.lo, z_range.hi));
  }
  return EnsembleState(std::move(freqs), std::move(weights), std::move(spins));
}

}  // namespace blochstab
