#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "blochstab/spectral.hpp"
#include "oracles.hpp"

using namespace blochstab;

namespace {

std::vector<double> random_freqs(std::uint64_t seed, std::size_t p, double lo = 1,
                                 double hi = 4) {
  Rng rng(seed, 0);
  return random_frequencies(rng, p, {lo, hi});
}

}  // namespace

TEST(Enumerate, SmallCases) {
  const auto one = enumerate_equilibria(1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].signs, std::vector<int>{-1});
  EXPECT_EQ(one[1].signs, std::vector<int>{1});
  const auto three = enumerate_equilibria(3);
  ASSERT_EQ(three.size(), 8u);
  EXPECT_EQ(three.front().signs, (std::vector<int>{-1, -1, -1}));
  EXPECT_EQ(three.back().signs, (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(three[1].signs, (std::vector<int>{1, -1, -1}));
}

TEST(Enumerate, UniqueAndGuarded) {
  const auto all = enumerate_equilibria(10);
  std::set<std::vector<int>> seen;
  for (const auto& q : all) seen.insert(q.signs);
  EXPECT_EQ(seen.size(), 1024u);
  EXPECT_THROW(enumerate_equilibria(0), std::invalid_argument);
  EXPECT_THROW(enumerate_equilibria(21), std::invalid_argument);
}

TEST(Linearization, RankOneStructure) {
  const Equilibrium q{{1, -1, -1}};
  const auto lin = linearization(q, {1.0, 2.0, 3.0});
  EXPECT_EQ(lin.K, lin.kappa * lin.zeta.transpose());
  EXPECT_EQ(lin.K.row(1), Eigen::RowVector3d(-1, -1, -1));
  EXPECT_TRUE(lin.E.isDiagonal());
  EXPECT_EQ(lin.E(2, 2), 3.0);
  EXPECT_THROW(linearization(Equilibrium{{1, 0}}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(linearization(Equilibrium{{1}}, {1.0, 2.0}), std::invalid_argument);
}

TEST(SpectrumAt, OneSpin) {
  const auto down = spectrum_at(Equilibrium{{-1}}, {2.0});
  EXPECT_EQ(down.classification, Stability::Attractor);
  ASSERT_EQ(down.eigenvalues.size(), 2u);
  EXPECT_LE(oracle::match_distance(down.eigenvalues, {{-1, 2}, {-1, -2}}), 1e-14);
  const auto up = spectrum_at(Equilibrium{{1}}, {2.0});
  EXPECT_EQ(up.classification, Stability::Repeller);
  EXPECT_LE(oracle::match_distance(up.eigenvalues, {{1, 2}, {1, -2}}), 1e-14);
  EXPECT_EQ(up.n_unstable, 2u);
}

TEST(SpectrumAt, AttractorAtSouthPole) {
  const auto f = random_freqs(4, 4);
  const auto rep = spectrum_at(Equilibrium{{-1, -1, -1, -1}}, f);
  EXPECT_EQ(rep.classification, Stability::Attractor);
  for (auto ell : rep.eigenvalues) EXPECT_LT(ell.real(), 0.0);
  EXPECT_LE(oracle::match_distance(rep.eigenvalues, oracle::block_spectrum(rep.q, f)), 1e-8);
}

TEST(SpectrumAt, PropertiesOnRandomSets) {
  for (std::uint64_t set = 0; set < 30; ++set) {
    const std::size_t p = 2 + set % 5;
    const auto f = random_freqs(1000 + set, p);
    for (const auto& q : enumerate_equilibria(p)) {
      const auto rep = spectrum_at(q, f);
      ASSERT_EQ(rep.eigenvalues.size(), 2 * p);
      EXPECT_TRUE(rep.hyperbolic);
      EXPECT_LE(rep.max_residual(), 1e-8);
      EXPECT_LE(oracle::match_distance(rep.eigenvalues, oracle::block_spectrum(q, f)), 1e-8);
      // conjugate symmetry between the branches
      std::vector<std::complex<double>> plus, minus_conj;
      for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
        if (rep.branches[k] == Branch::Plus) {
          plus.push_back(rep.eigenvalues[k]);
        } else {
          minus_conj.push_back(std::conj(rep.eigenvalues[k]));
        }
      }
      EXPECT_LE(oracle::match_distance(plus, minus_conj), 1e-8);
      const auto ups = std::count(q.signs.begin(), q.signs.end(), 1);
      if (ups == 0) EXPECT_EQ(rep.classification, Stability::Attractor);
      if (ups == static_cast<long>(p)) EXPECT_EQ(rep.classification, Stability::Repeller);
      if (ups > 0 && ups < static_cast<long>(p)) {
        EXPECT_EQ(rep.classification, Stability::Saddle);
        EXPECT_GE(rep.n_unstable, 2u);
        EXPECT_GE(rep.n_stable, 2u);
      }
      EXPECT_EQ(rep.n_unstable % 2, 0u);
    }
  }
}

TEST(SpectrumAt, SaddleForMixedPattern) {
  const auto f = random_freqs(3, 3);
  const auto rep = spectrum_at(Equilibrium{{1, -1, -1}}, f);
  EXPECT_EQ(rep.classification, Stability::Saddle);
  EXPECT_GE(rep.n_unstable, 2u);
}

TEST(SpectrumAt, NearDegenerateFlag) {
  const auto rep = spectrum_at(Equilibrium{{-1, -1}}, {1.0, 1.0 + 1e-9});
  EXPECT_TRUE(rep.near_degenerate);
  EXPECT_FALSE(spectrum_at(Equilibrium{{-1, -1}}, {1.0, 2.0}).near_degenerate);
}

TEST(Residual, Examples) {
  const Equilibrium q{{-1}};
  EXPECT_EQ(secular_residual({-1, 2}, q, {2.0}), 0.0);
  const auto r = secular_residual({1, 0}, q, {2.0});
  EXPECT_NEAR(r.real(), -1.2, 1e-15);
  EXPECT_NEAR(r.imag(), 0.4, 1e-15);
  EXPECT_NEAR(std::abs(secular_residual({-1, -2}, q, {2.0}, Branch::Minus)), 0.0, 1e-15);
  EXPECT_THROW(secular_residual({0, 2}, q, {2.0}), std::domain_error);
  EXPECT_THROW(secular_residual({0, -2}, q, {2.0}, Branch::Minus), std::domain_error);
}

TEST(Vandermonde, Examples) {
  EXPECT_EQ(vandermonde_det({1, 2, 3}), -2.0);
  EXPECT_EQ(vandermonde_det({1, 1, 5}), 0.0);
  EXPECT_EQ(vandermonde_det({4}), 1.0);
}

TEST(Vandermonde, MatchesDenseDeterminant) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t p = 2 + seed % 7;
    const auto f = random_freqs(seed, p);
    EXPECT_LE(oracle::vandermonde_relative_error(f, vandermonde_det(f)), 1e-10) << p;
  }
  EXPECT_EQ(oracle::dense_vandermonde_det({1.0, 2.0, 3.0}), 2);  // (2-1)(3-1)(3-2)
  EXPECT_EQ(oracle::dense_vandermonde_det({1.5, 0.5, 1.5}), 0);
}

TEST(Invariance, EquilibriumStaysInside) {
  const auto s = target_state({1.0, 2.0, 3.5}, unit_weights(3), -1);
  EXPECT_LE(invariance_check_free(s, 100.0), 1e-9);
}

TEST(Invariance, EscapesWithinBeatPeriod) {
  const EnsembleState s({1.0, 1.7}, unit_weights(2), {make_spin(1, 0, 0), make_spin(-1, 0, 0)});
  const double beat = 2 * M_PI / 0.7;
  EXPECT_GT(invariance_check_free(s, beat), 0.1);
  // closed form: x1 + x2 = cos t - cos 1.7 t, y1 + y2 = sin t - sin 1.7 t
  double worst = 0.0;
  for (double t = 0.0; t <= beat; t += 0.01) {
    worst = std::max(worst, std::abs(std::cos(t) - std::cos(1.7 * t)) +
                                std::abs(std::sin(t) - std::sin(1.7 * t)));
  }
  EXPECT_NEAR(invariance_check_free(s, beat), worst, 1e-3);
}

TEST(Invariance, RejectsNonzeroSums) {
  const EnsembleState s({1.0}, {1.0}, {make_spin(1, 0, 0)});
  EXPECT_THROW(invariance_check_free(s, 1.0), std::invalid_argument);
}
