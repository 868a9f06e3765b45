#pragma once

// Equilibria of the closed loop with unit-weight feedback and the spectra of
// their linearizations.
//
// The equilibria are the 2^p states with every spin at a pole, (0, 0, s_j).
// On the tangent space the linearization is the real block matrix
// [[K, -E], [E, K]] with K = kappa zeta^T (kappa_j = s_j, zeta = ones) and
// E = diag(e). Its spectrum is the union of the spectra of K + iE and K - iE;
// the eigenvalues here come from those two p x p complex matrices.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blochstab/core.hpp"

namespace blochstab {

struct Equilibrium {
  std::vector<int> signs;  ///< z-component of each spin, +-1
  friend bool operator==(const Equilibrium&, const Equilibrium&) = default;
};

std::string to_string(const Equilibrium& q);

inline constexpr std::size_t kMaxEnumeratedSpins = 20;

/// All 2^p sign patterns. Pattern k has spin j at +1 iff bit j of k is set,
/// so the list starts at all -1 and ends at all +1. Throws for p = 0 or
/// p > kMaxEnumeratedSpins.
std::vector<Equilibrium> enumerate_equilibria(std::size_t p);

/// Equilibrium as an ensemble state with unit weights.
EnsembleState equilibrium_state(const Equilibrium& q,
                                std::vector<double> freqs);

struct LinearizationPair {
  Eigen::MatrixXd K;
  Eigen::MatrixXd E;
  Eigen::VectorXd kappa;
  Eigen::VectorXd zeta;
};

LinearizationPair linearization(const Equilibrium& q,
                                const std::vector<double>& freqs);

/// Which complexified block an eigenvalue belongs to.
enum class Branch { Plus, Minus };

/// Secular identity residual. For an eigenvalue ell = lambda + i mu of
/// K + iE:
///   sum_j s_j (lambda + i (mu - e_j)) / (lambda^2 + (e_j - mu)^2) - 1,
/// and for K - iE the conjugate identity
///   sum_j s_j (lambda - i (mu + e_j)) / (lambda^2 + (e_j + mu)^2) - 1.
/// Throws std::domain_error when a denominator vanishes (ell = +-i e_j).
std::complex<double> secular_residual(std::complex<double> ell,
                                       const Equilibrium& q,
                                       const std::vector<double>& freqs,
                                       Branch branch = Branch::Plus);

enum class Stability { Attractor, Repeller, Saddle };
std::string to_string(Stability s);

struct EquilibriumReport {
  Equilibrium q;
  std::vector<std::complex<double>> eigenvalues;  ///< K+iE first, then K-iE
  std::vector<Branch> branches;
  std::vector<std::complex<double>> residuals;
  std::size_t n_unstable = 0;
  std::size_t n_stable = 0;
  Stability classification = Stability::Saddle;
  double min_abs_real = 0.0;
  double hyperbolicity_tolerance = 0.0;  ///< 1e-8 * max(1, max |e_i|)
  bool hyperbolic = false;
  double min_gap = 0.0;
  bool near_degenerate = false;  ///< min frequency gap below 1e-6

  double max_residual() const;
};

inline constexpr double kNearDegenerateGap = 1e-6;

/// Eigenvalues of K +- iE by a dense complex eigensolver, their secular
/// residuals and the stability class. Throws std::runtime_error if the
/// eigensolver does not converge.
EquilibriumReport spectrum_at(const Equilibrium& q,
                              const std::vector<double>& freqs);

/// prod_{i<j} (e_i - e_j). Nonzero iff the frequencies are pairwise distinct,
/// which is what makes the all-poles set the largest invariant subset of
/// {sum x = sum y = 0}.
double vandermonde_det(const std::vector<double>& freqs);

/// Integrates the free (zero control) system from a state with vanishing
/// transverse sums and returns max_t (|sum x_i(t)| + |sum y_i(t)|), weighted
/// by the state's weights when `weighted` is set. Uses exact per-spin
/// rotations. Throws std::invalid_argument if the initial sums exceed 1e-9.
double invariance_check_free(const EnsembleState& s, double horizon,
                             double h = 0.01, bool weighted = false);

}  // namespace blochstab
