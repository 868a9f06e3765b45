#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "blochstab/spectral.hpp"

namespace oracle {

/// Spectrum of the real 2p x 2p block matrix [[K, -E], [E, K]] from a generic
/// real eigensolver.
inline std::vector<std::complex<double>> block_spectrum(const blochstab::Equilibrium& q,
                                                        const std::vector<double>& f) {
  const auto p = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      M(i, j) = q.signs[i];
      M(p + i, p + j) = q.signs[i];
    }
    M(i, p + i) = -f[i];
    M(p + i, i) = f[i];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + 2 * p};
}

/// Largest distance under a greedy nearest-neighbour pairing of two
/// multisets of complex numbers.
inline double match_distance(std::vector<std::complex<double>> a,
                             std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](auto u, auto v) {
      return std::abs(u - x) < std::abs(v - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

/// det of the p x p matrix V[r][c] = e_c^r, evaluated exactly in rational
/// arithmetic (every double is a rational) by fraction-free elimination.
inline mpq_class dense_vandermonde_det(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n));
  for (std::size_t c = 0; c < n; ++c) {
    mpq_class pw = 1;
    const mpq_class e(f[c]);
    for (std::size_t r = 0; r < n; ++r) {
      a[r][c] = pw;
      pw *= e;
    }
  }
  mpq_class det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a[piv][k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      det = -det;
    }
    det *= a[k][k];
    for (std::size_t r = k + 1; r < n; ++r) {
      const mpq_class m = a[r][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[r][c] -= m * a[k][c];
    }
  }
  return det;
}

/// Relative gap between the product formula and the dense determinant,
/// after the (-1)^{p(p-1)/2} reordering sign relating the two conventions.
inline double vandermonde_relative_error(const std::vector<double>& f, double product) {
  const std::size_t p = f.size();
  mpq_class dense = dense_vandermonde_det(f);
  if ((p * (p - 1) / 2) % 2) dense = -dense;
  if (dense == 0) return product == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  const mpq_class diff = mpq_class(product) - dense;
  return std::abs(diff.get_d() / dense.get_d());
}

}  // namespace oracle
