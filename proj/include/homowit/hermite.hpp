// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hermite.hpp
 * @brief Fock-state wavefunctions in the quadrature representation.
 *
 * phi_n(x) = <x|n> = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)), so the
 * vacuum has quadrature variance 1/2. Values are produced by the stable
 * three-term recurrence on the normalized functions, never through raw
 * Hermite polynomials.
 */

#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace homowit {

/// phi_0(x)..phi_{out.size()-1}(x).
void hermite_functions(double x, std::span<double> out);

double hermite_function(int n, double x);

/// Evaluator for phi_0..phi_{n_max}.
class HermiteWavefunctionTable {
 public:
  explicit HermiteWavefunctionTable(int n_max);

  int n_max() const { return n_max_; }
  double operator()(int n, double x) const;
  void evaluate(double x, std::span<double> out) const { hermite_functions(x, out); }

 private:
  int n_max_;
};

/// G[n][m] = int_0^inf phi_n(x) phi_m(x) dx.
///
/// Computed exactly from the polynomial expansion of phi_n phi_m against the
/// half-line Gaussian moments int_0^inf x^k e^{-x^2} dx = Gamma((k+1)/2)/2.
class HalfLineOverlapTable {
 public:
  explicit HalfLineOverlapTable(int n_max);

  int n_max() const { return n_max_; }
  double operator()(int n, int m) const;
  const Eigen::MatrixXd& table() const { return table_; }

 private:
  int n_max_;
  Eigen::MatrixXd table_;
};

inline constexpr int kHalfLineCacheMax = 16;

/// Cached G(n, m) for n, m <= kHalfLineCacheMax. Throws std::out_of_range beyond.
double half_line_overlap(int n, int m);

/// Uniform grid on [lo, hi] carrying cumulative integrals
///   I_jl(x_g) = int_lo^{x_g} phi_j(x) phi_l(x) dx,  j <= l <= n_max,
/// which turn any density of the form sum_jl w_jl phi_j phi_l into a CDF that
/// costs O(n_max^2) per grid point. Used by the inverse-CDF samplers.
class QuadratureGrid {
 public:
  QuadratureGrid(int n_max, double lo = -6.0, double hi = 6.0, int points = 2048);

  int n_max() const { return n_max_; }
  int points() const { return points_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double x(int g) const { return lo_ + step_ * g; }
  double step() const { return step_; }

  /// Number of (j <= l) pairs.
  int pair_count() const { return pairs_; }
  int pair_index(int j, int l) const;

  /// Cumulative integrals at grid point g, one entry per (j <= l) pair.
  std::span<const double> cumulative(int g) const {
    return {cumulative_.data() + static_cast<std::size_t>(g) * pairs_,
            static_cast<std::size_t>(pairs_)};
  }

  /// Evaluates sum_p coeff[p] * I_p(x_g).
  double cdf_at(int g, std::span<const double> coeff) const;

  /// Inverse of the piecewise-linear CDF built from coeff, at level u in [0,1).
  /// coeff must describe a nonnegative density.
  double invert(std::span<const double> coeff, double u) const;

 private:
  int n_max_;
  double lo_;
  double hi_;
  int points_;
  double step_;
  int pairs_;
  std::vector<double> cumulative_;
};

}  // namespace homowit
