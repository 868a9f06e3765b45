#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "blochstab/core.hpp"

using namespace blochstab;

TEST(MakeSpin, KeepsUnitVector) {
  const auto s = make_spin(0, 0, -1);
  EXPECT_EQ(s.vec(), Vec3(0, 0, -1));
}

TEST(MakeSpin, ScalesToUnitLength) {
  EXPECT_EQ(make_spin(0, 0, -2).vec(), Vec3(0, 0, -1));
  const auto s = make_spin(1, 1, 1);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(s.vec()(k), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(s.x(), 0.57735, 1e-5);
}

TEST(MakeSpin, RejectsZeroAndNonFinite) {
  EXPECT_THROW(make_spin(0, 0, 0), std::invalid_argument);
  EXPECT_THROW(make_spin(std::nan(""), 0, 1), std::invalid_argument);
  EXPECT_THROW(make_spin(std::numeric_limits<double>::infinity(), 0, 1),
               std::invalid_argument);
}

TEST(EnsembleState, ValidatesShapeAndWeights) {
  const std::vector<SpinState> two{make_spin(0, 0, 1), make_spin(0, 0, 1)};
  EXPECT_THROW(EnsembleState({1.0}, {1.0, 1.0}, two), std::invalid_argument);
  EXPECT_THROW(EnsembleState({1.0, 2.0}, {1.0}, two), std::invalid_argument);
  EXPECT_THROW(EnsembleState({1.0, 2.0}, {1.0, 0.0}, two), std::invalid_argument);
  EXPECT_THROW(EnsembleState({1.0, 2.0}, {1.0, -1.0}, two), std::invalid_argument);
  EXPECT_NO_THROW(EnsembleState({1.0, 2.0}, {1.0, 0.5}, two));
}

TEST(EnsembleState, RejectsOffSphereSpin) {
  const auto bad = SpinState::from_unit(Vec3(0, 0, 1.0 + 1e-6));
  EXPECT_THROW(EnsembleState({1.0}, {1.0}, {bad}), std::invalid_argument);
}

TEST(EnsembleState, MinGap) {
  const auto s = target_state({1.0, 3.5, 1.25}, unit_weights(3), -1);
  EXPECT_DOUBLE_EQ(s.min_frequency_gap(), 0.25);
  EXPECT_TRUE(std::isinf(target_state(1, -1).min_frequency_gap()));
}

TEST(Weights, GeometricFamily) {
  const auto w = geometric_weights(4, 2.0);
  EXPECT_EQ(w, (std::vector<double>{0.5, 0.25, 0.125, 0.0625}));
  const auto w11 = geometric_weights(30, 1.1);
  for (std::size_t i = 1; i < w11.size(); ++i) EXPECT_LT(w11[i], w11[i - 1]);
  EXPECT_THROW(geometric_weights(3, 1.0), std::invalid_argument);
  EXPECT_TRUE(is_unit_weights(unit_weights(5)));
  EXPECT_FALSE(is_unit_weights(w));
}

TEST(TargetState, Poles) {
  const auto down = target_state(3, -1);
  ASSERT_EQ(down.size(), 3u);
  for (const auto& s : down.spins()) EXPECT_EQ(s.vec(), Vec3(0, 0, -1));
  const auto up = target_state(1, +1);
  EXPECT_EQ(up.spin(0).vec(), Vec3(0, 0, 1));
  EXPECT_THROW(target_state(3, 0), std::invalid_argument);
}

TEST(WeightedDistance, IdentityAndPoles) {
  const auto s = random_ensemble(7, 5, {1, 4}, {-1, 1}, unit_weights(5));
  EXPECT_EQ(weighted_distance(s, s), 0.0);

  for (std::size_t p : {1u, 3u, 10u}) {
    const auto w = geometric_weights(p, 2.0);
    std::vector<double> f(p);
    for (std::size_t i = 0; i < p; ++i) f[i] = 1.0 + static_cast<double>(i);
    const auto plus = target_state(f, w, +1);
    const auto minus = target_state(f, w, -1);
    EXPECT_NEAR(weighted_distance(plus, minus),
                2.0 * (1.0 - std::pow(2.0, -static_cast<double>(p))), 1e-15);
    double sw = 0.0;
    for (double x : w) sw += x;
    EXPECT_NEAR(weighted_distance(plus, minus), 2.0 * sw, 1e-15);
  }
}

TEST(WeightedDistance, MatchesResummation) {
  const auto w = geometric_weights(5, 2.0);
  const auto a = random_ensemble(11, 5, {1, 4}, {-1, 1}, w);
  Rng rng(99, 3);
  std::vector<SpinState> spins;
  for (int i = 0; i < 5; ++i) spins.push_back(random_spin(rng, -1, 1));
  const auto c = a.with_spins(spins);
  long double oracle = 0.0L;
  for (std::size_t i = 0; i < 5; ++i) {
    long double sq = 0.0L;
    for (int k = 0; k < 3; ++k) {
      const long double d = static_cast<long double>(a.spin(i).vec()(k)) - c.spin(i).vec()(k);
      sq += d * d;
    }
    oracle += static_cast<long double>(w[i]) * std::sqrt(sq);
  }
  EXPECT_NEAR(weighted_distance(a, c), static_cast<double>(oracle), 1e-12);
}

TEST(WeightedDistance, RejectsMismatch) {
  const auto a = target_state(3, -1);
  const auto b = target_state(4, -1);
  EXPECT_THROW(weighted_distance(a, b), std::invalid_argument);
  const auto c = target_state({1, 2, 3}, geometric_weights(3, 2.0), -1);
  EXPECT_THROW(weighted_distance(a, c), std::invalid_argument);
}

TEST(WeightedDistance, MetricAxiomsOnRandomTriples) {
  const auto w = geometric_weights(6, 2.0);
  const auto base = random_ensemble(1, 6, {1, 4}, {-1, 1}, w);
  Rng rng(2024, 0);
  const auto draw = [&] {
    std::vector<SpinState> s;
    for (int i = 0; i < 6; ++i) s.push_back(random_spin(rng, -1, 1));
    return base.with_spins(std::move(s));
  };
  for (int k = 0; k < 1000; ++k) {
    const auto a = draw();
    const auto b = draw();
    const auto c = draw();
    const double ab = weighted_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_GT(ab, 0.0);
    EXPECT_EQ(ab, weighted_distance(b, a));
    EXPECT_LE(weighted_distance(a, c), ab + weighted_distance(b, c) + 1e-15);
  }
}

TEST(RandomEnsemble, Deterministic) {
  const auto a = random_ensemble(42, 30, {1, 4}, {0.8, 1}, unit_weights(30));
  const auto b = random_ensemble(42, 30, {1, 4}, {0.8, 1}, unit_weights(30));
  const auto c = random_ensemble(43, 30, {1, 4}, {0.8, 1}, unit_weights(30));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.freqs(), c.freqs());
}

TEST(RandomEnsemble, InvariantsOnPaperScale) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = random_ensemble(seed, 30, {1, 4}, {0.8, 1}, unit_weights(30));
    ASSERT_EQ(s.size(), 30u);
    EXPECT_GT(s.min_frequency_gap(), 0.0);
    for (std::size_t i = 0; i < 30; ++i) {
      EXPECT_GE(s.freqs()[i], 1.0);
      EXPECT_LE(s.freqs()[i], 4.0);
      EXPECT_GE(s.spin(i).z(), 0.8);
      EXPECT_LE(s.spin(i).z(), 1.0);
      EXPECT_LE(std::abs(s.spin(i).vec().norm() - 1.0), 1e-9);
    }
  }
}

TEST(RandomEnsemble, DegenerateBandGivesPole) {
  const auto s = random_ensemble(5, 4, {1, 4}, {-1, -1}, unit_weights(4));
  for (const auto& sp : s.spins()) {
    EXPECT_NEAR(sp.x(), 0.0, 1e-15);
    EXPECT_NEAR(sp.y(), 0.0, 1e-15);
    EXPECT_EQ(sp.z(), -1.0);
  }
}

TEST(RandomEnsemble, RejectsBadRanges) {
  EXPECT_THROW(random_ensemble(1, 3, {2, 2}, {0, 1}, unit_weights(3)), std::invalid_argument);
  EXPECT_THROW(random_ensemble(1, 3, {3, 2}, {0, 1}, unit_weights(3)), std::invalid_argument);
  EXPECT_THROW(random_ensemble(1, 3, {1, 2}, {0.5, 0.1}, unit_weights(3)), std::invalid_argument);
  EXPECT_THROW(random_ensemble(1, 3, {1, 2}, {-2, 1}, unit_weights(3)), std::invalid_argument);
  EXPECT_THROW(random_ensemble(1, 0, {1, 2}, {0, 1}, {}), std::invalid_argument);
  EXPECT_THROW(random_ensemble(1, 3, {1, 2}, {0, 1}, unit_weights(2)), std::invalid_argument);
}

TEST(Rng, StreamsAreIndependentAndInRange) {
  Rng a(1, 0);
  Rng b(1, 1);
  Rng a2(1, 0);
  int same = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = a.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    EXPECT_EQ(x, a2.uniform());
    same += x == b.uniform();
  }
  EXPECT_EQ(same, 0);
}
