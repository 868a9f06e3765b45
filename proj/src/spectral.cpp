#include "blochstab/spectral.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "blochstab/dynamics.hpp"

namespace blochstab {

std::string to_string(const Equilibrium& q) {
  std::string out;
  for (std::size_t j = 0; j < q.signs.size(); ++j) {
    if (j) out += ' ';
    out += q.signs[j] > 0 ? "+1" : "-1";
  }
  return out;
}

std::vector<Equilibrium> enumerate_equilibria(std::size_t p) {
  if (p == 0 || p > kMaxEnumeratedSpins) {
    std::ostringstream msg;
    msg << "enumerate_equilibria: p must be in [1, " << kMaxEnumeratedSpins
        << "] (got " << p << ")";
    throw std::invalid_argument(msg.str());
  }
  const std::size_t count = std::size_t{1} << p;
  std::vector<Equilibrium> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Equilibrium q;
    q.signs.resize(p);
    for (std::size_t j = 0; j < p; ++j) q.signs[j] = (k >> j) & 1u ? 1 : -1;
    out.push_back(std::move(q));
  }
  return out;
}

EnsembleState equilibrium_state(const Equilibrium& q,
                                std::vector<double> freqs) {
  std::vector<SpinState> spins;
  spins.reserve(q.signs.size());
  for (int s : q.signs) spins.push_back(make_spin(0.0, 0.0, s));
  const auto p = freqs.size();
  return EnsembleState(std::move(freqs), unit_weights(p), std::move(spins));
}

namespace {

void check_pattern(const Equilibrium& q, const std::vector<double>& freqs) {
  if (q.signs.size() != freqs.size() || freqs.empty()) {
    throw std::invalid_argument(
        "equilibrium pattern and frequencies must have the same nonzero "
        "length");
  }
  for (int s : q.signs) {
    if (s != 1 && s != -1) {
      throw std::invalid_argument("equilibrium signs must be +1 or -1");
    }
  }
}

}  // namespace

LinearizationPair linearization(const Equilibrium& q,
                                const std::vector<double>& freqs) {
  check_pattern(q, freqs);
  const auto p = static_cast<Eigen::Index>(freqs.size());
  LinearizationPair lin;
  lin.kappa.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) lin.kappa(j) = q.signs[j];
  lin.zeta = Eigen::VectorXd::Ones(p);
  lin.K = lin.kappa * lin.zeta.transpose();
  lin.E = Eigen::VectorXd::Map(freqs.data(), p).asDiagonal();
  return lin;
}

std::complex<double> secular_residual(std::complex<double> ell,
                                       const Equilibrium& q,
                                       const std::vector<double>& freqs,
                                       Branch branch) {
  check_pattern(q, freqs);
  const double lambda = ell.real();
  const double mu = ell.imag();
  std::complex<double> sum = 0.0;
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const double shift = branch == Branch::Plus ? mu - freqs[j] : mu + freqs[j];
    const double denom = lambda * lambda + shift * shift;
    if (denom == 0.0) {
      throw std::domain_error(
          "secular_residual: ell coincides with a frequency on the imaginary "
          "axis (non-hyperbolic input)");
    }
    const std::complex<double> num =
        branch == Branch::Plus ? std::complex<double>(lambda, shift)
                               : std::complex<double>(lambda, -shift);
    sum += static_cast<double>(q.signs[j]) * num / denom;
  }
  return sum - 1.0;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Attractor:
      return "attractor";
    case Stability::Repeller:
      return "repeller";
    case Stability::Saddle:
      return "saddle";
  }
  return "?";
}

double EquilibriumReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max(m, std::abs(r));
  return m;
}

EquilibriumReport spectrum_at(const Equilibrium& q,
                              const std::vector<double>& freqs) {
  const LinearizationPair lin = linearization(q, freqs);
  const std::complex<double> i(0.0, 1.0);
  const Eigen::MatrixXcd plus = lin.K.cast<std::complex<double>>() +
                                i * lin.E.cast<std::complex<double>>();
  const Eigen::MatrixXcd minus = lin.K.cast<std::complex<double>>() -
                                 i * lin.E.cast<std::complex<double>>();

  EquilibriumReport rep;
  rep.q = q;
  for (const auto& [m, branch] :
       {std::pair{&plus, Branch::Plus}, std::pair{&minus, Branch::Minus}}) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(*m, false);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("spectrum_at: complex eigensolver failed for " +
                               to_string(q));
    }
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
      rep.eigenvalues.push_back(solver.eigenvalues()(k));
      rep.branches.push_back(branch);
    }
  }

  double max_e = 1.0;
  for (double e : freqs) max_e = std::max(max_e, std::abs(e));
  rep.hyperbolicity_tolerance = 1e-8 * max_e;
  rep.min_abs_real = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
    const auto ell = rep.eigenvalues[k];
    rep.min_abs_real = std::min(rep.min_abs_real, std::abs(ell.real()));
    if (ell.real() > 0.0) ++rep.n_unstable;
    if (ell.real() < 0.0) ++rep.n_stable;
    try {
      rep.residuals.push_back(secular_residual(ell, q, freqs, rep.branches[k]));
    } catch (const std::domain_error&) {
      rep.residuals.push_back(
          std::complex<double>(std::numeric_limits<double>::infinity()));
    }
  }
  rep.hyperbolic = rep.min_abs_real > rep.hyperbolicity_tolerance;
  if (rep.n_stable == rep.eigenvalues.size()) {
    rep.classification = Stability::Attractor;
  } else if (rep.n_unstable == rep.eigenvalues.size()) {
    rep.classification = Stability::Repeller;
  } else {
    rep.classification = Stability::Saddle;
  }
  rep.min_gap = min_gap(freqs);
  rep.near_degenerate = rep.min_gap < kNearDegenerateGap;
  return rep;
}

double vandermonde_det(const std::vector<double>& freqs) {
  double det = 1.0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    for (std::size_t j = i + 1; j < freqs.size(); ++j) {
      det *= freqs[i] - freqs[j];
    }
  }
  return det;
}

double invariance_check_free(const EnsembleState& s, double horizon, double h,
                             bool weighted) {
  const auto deviation = [&](const std::vector<Vec3>& x) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = weighted ? s.weights()[i] : 1.0;
      sx += w * x[i].x();
      sy += w * x[i].y();
    }
    return std::abs(sx) + std::abs(sy);
  };
  std::vector<Vec3> x;
  for (const auto& sp : s.spins()) x.push_back(sp.vec());
  if (deviation(x) > 1e-9) {
    throw std::invalid_argument(
        "invariance_check_free: initial state must have vanishing transverse "
        "sums");
  }
  if (!(h > 0.0) || !(horizon >= 0.0)) {
    throw std::invalid_argument("invariance_check_free: need h > 0, horizon >= 0");
  }
  double worst = 0.0;
  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  for (std::size_t k = 1; k <= n_steps; ++k) {
    // Free rotation is exact, so rotate from the initial state to t_k.
    const double t = std::min(static_cast<double>(k) * h, horizon);
    std::vector<Vec3> xt(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xt[i] = rodrigues_rotate(x[i], Vec3(0.0, 0.0, s.freqs()[i]), t);
    }
    worst = std::max(worst, deviation(xt));
  }
  return worst;
}

}  // namespace blochstab
