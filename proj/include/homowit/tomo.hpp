// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file tomo.hpp
 * @brief Photon-number statistics from phase-averaged quadrature samples.
 *
 * With the local-oscillator phase averaged, the quadrature density of a
 * mode is sum_m p(m) phi_m(x)^2. A reconstruction kernel f_n with
 * int f_n phi_m^2 dx = delta_nm turns samples into unbiased estimates
 * p(n) = <f_n(x)>.
 */

#pragma once

#include "homowit/fock.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace homowit {

inline constexpr int kDefaultTomoLevels = 4;
inline constexpr int kMaxTomoLevels = 6;

/// Kernels f_0..f_{n_max} expanded on phi_0^2..phi_{n_max+guard}^2.
///
/// The expansion coefficients are the minimum-L2-norm solution of the moment
/// system int f_n phi_m^2 = delta_nm for m <= n_max + guard, obtained from
/// the Gram matrix of the phi_m^2 with a rank-revealing decomposition. Guard
/// levels make the estimates of p(0..n_max) blind to populations up to
/// n_max + guard as well.
class ReconstructionKernel {
 public:
  static ReconstructionKernel build(int n_max = kDefaultTomoLevels, int guard = 0);

  int n_max() const { return n_max_; }
  int guard() const { return guard_; }
  double condition_number() const { return condition_; }

  /// Samples beyond |x| > support() contribute zero.
  double support() const { return support_; }

  double operator()(int n, double x) const;
  /// f_0(x)..f_{n_max}(x); zero outside the support.
  void evaluate(double x, std::span<double> out) const;

  /// int f_n(x) phi_m(x)^2 dx by trapezoid on a fine grid.
  double moment(int n, int m) const;

  /// Kernel values on a uniform grid over the support.
  std::vector<double> tabulate(int n, int points) const;

 private:
  ReconstructionKernel(int n_max, int guard, Eigen::MatrixXd coeff, double condition);

  int n_max_;
  int guard_;
  double support_;
  double condition_;
  Eigen::MatrixXd coeff_;  // (n_max+1) x (n_max+guard+1)
};

struct PhotonNumberDistribution {
  Party party = Party::A;
  std::vector<double> p;        // p(n = j), j = 0..n_max, unclipped
  std::vector<double> delta_p;  // bootstrap standard deviations, empty until computed
  double p_tail = 0.0;          // p(n >= 2) = 1 - p(0) - p(1)
  double delta_p_tail = 0.0;
  std::size_t n_samples = 0;
  std::size_t outside_support = 0;
  bool has_negative = false;

  /// Estimates clipped to [0, 1].
  std::vector<double> clipped() const;
};

/// p(n = j) = mean of f_j over samples. Needs at least 1000 samples.
PhotonNumberDistribution estimate_distribution(std::span<const double> samples, const ReconstructionKernel& kernel,
                                               Party party = Party::A);

struct PStar {
  double value = 0.0;  // clipped at 0
  double raw = 0.0;
  bool clipped = false;
  /// Linear sum of the four bootstrap errors entering the bound.
  double delta = 0.0;
};

/// p* = 2 - sum_{j=0,1} [p(n_A = j) + p(n_B = j)].
PStar p_star(const PhotonNumberDistribution& a, const PhotonNumberDistribution& b);

/// Phase-averaged quadrature samples of the diagonal state sum_n p(n)|n><n|.
std::vector<double> sample_diagonal_quadratures(std::span<const double> diagonals, std::size_t n,
                                                std::uint64_t seed, std::uint64_t stream = 0);

struct BootstrapErrors {
  std::vector<double> delta_p;
  double delta_p_tail = 0.0;
  int rounds = 0;
};

/// Parametric bootstrap: resimulate n_samples quadratures from the
/// estimated diagonals (clipped and renormalized), re-estimate, and report
/// per-level standard deviations over the rounds.
BootstrapErrors bootstrap_errors(std::span<const double> diagonals, std::size_t n_samples,
                                 const ReconstructionKernel& kernel, int rounds = 200, std::uint64_t seed = 0);

/// estimate_distribution followed by bootstrap_errors on its own estimate.
PhotonNumberDistribution estimate_with_errors(std::span<const double> samples, const ReconstructionKernel& kernel,
                                              Party party, int rounds, std::uint64_t seed);

}  // namespace homowit
