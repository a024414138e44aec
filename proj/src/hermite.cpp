// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace homowit {

void hermite_functions(double x, std::span<double> out) {
  if (out.empty()) return;
  const double e = std::exp(-0.5 * x * x);
  out[0] = e / std::sqrt(std::sqrt(std::numbers::pi));
  if (out.size() == 1) return;
  out[1] = std::numbers::sqrt2 * x * out[0];
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double nd = static_cast<double>(n);
    out[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * x * out[n] - std::sqrt(nd / (nd + 1.0)) * out[n - 1];
  }
}

double hermite_function(int n, double x) {
  if (n < 0) throw std::out_of_range("negative Fock index");
  std::vector<double> v(n + 1);
  hermite_functions(x, v);
  return v[n];
}

HermiteWavefunctionTable::HermiteWavefunctionTable(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
}

double HermiteWavefunctionTable::operator()(int n, double x) const {
  if (n < 0 || n > n_max_) throw std::out_of_range("Fock index outside table");
  return hermite_function(n, x);
}

namespace {

// Coefficients of P_n with phi_n(x) = P_n(x) exp(-x^2/2), via the same
// recurrence as the function values.
std::vector<std::vector<long double>> normalized_hermite_coefficients(int n_max) {
  std::vector<std::vector<long double>> p(n_max + 1);
  p[0] = {1.0L / std::sqrt(std::sqrt(std::numbers::pi_v<long double>))};
  if (n_max >= 1) p[1] = {0.0L, std::numbers::sqrt2_v<long double> * p[0][0]};
  for (int n = 1; n < n_max; ++n) {
    const long double a = std::sqrt(2.0L / (n + 1));
    const long double b = std::sqrt(static_cast<long double>(n) / (n + 1));
    std::vector<long double> next(n + 2, 0.0L);
    for (int k = 0; k <= n; ++k) next[k + 1] += a * p[n][k];
    for (int k = 0; k < n; ++k) next[k] -= b * p[n - 1][k];
    p[n + 1] = std::move(next);
  }
  return p;
}

}  // namespace

HalfLineOverlapTable::HalfLineOverlapTable(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  const auto poly = normalized_hermite_coefficients(n_max);
  std::vector<long double> moment(2 * n_max + 1);
  for (int k = 0; k <= 2 * n_max; ++k) moment[k] = 0.5L * std::tgamma(0.5L * (k + 1));
  table_.resize(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    for (int m = n; m <= n_max; ++m) {
      double g;
      if ((n + m) % 2 == 0) {
        // Even integrand: half of the full-line orthonormality.
        g = n == m ? 0.5 : 0.0;
      } else {
        long double s = 0.0L;
        for (std::size_t a = 0; a < poly[n].size(); ++a)
          for (std::size_t b = 0; b < poly[m].size(); ++b) s += poly[n][a] * poly[m][b] * moment[a + b];
        g = static_cast<double>(s);
      }
      table_(n, m) = g;
      table_(m, n) = g;
    }
  }
}

double HalfLineOverlapTable::operator()(int n, int m) const {
  if (n < 0 || m < 0 || n > n_max_ || m > n_max_) throw std::out_of_range("Fock index outside table");
  return table_(n, m);
}

double half_line_overlap(int n, int m) {
  static const HalfLineOverlapTable cache(kHalfLineCacheMax);
  return cache(n, m);
}

QuadratureGrid::QuadratureGrid(int n_max, double lo, double hi, int points)
    : n_max_(n_max), lo_(lo), hi_(hi), points_(points) {
  if (n_max < 0 || points < 2 || !(hi > lo)) throw std::invalid_argument("invalid quadrature grid");
  step_ = (hi - lo) / (points - 1);
  const int dim = n_max + 1;
  pairs_ = dim * (dim + 1) / 2;
  cumulative_.assign(static_cast<std::size_t>(points) * pairs_, 0.0);

  // Simpson on each cell (endpoints + midpoint) keeps the cumulative error
  // around 1e-10 for n_max <= 6 on the default grid.
  std::vector<double> left(dim), mid(dim), right(dim);
  hermite_functions(x(0), left);
  for (int g = 0; g + 1 < points; ++g) {
    hermite_functions(x(g) + 0.5 * step_, mid);
    hermite_functions(x(g + 1), right);
    const double* prev = cumulative_.data() + static_cast<std::size_t>(g) * pairs_;
    double* next = cumulative_.data() + static_cast<std::size_t>(g + 1) * pairs_;
    for (int j = 0; j < dim; ++j)
      for (int l = j; l < dim; ++l) {
        const int p = pair_index(j, l);
        next[p] = prev[p] + step_ / 6.0 * (left[j] * left[l] + 4.0 * mid[j] * mid[l] + right[j] * right[l]);
      }
    left.swap(right);
  }
}

int QuadratureGrid::pair_index(int j, int l) const {
  if (j > l) std::swap(j, l);
  const int dim = n_max_ + 1;
  return j * dim - j * (j - 1) / 2 + (l - j);
}

double QuadratureGrid::cdf_at(int g, std::span<const double> coeff) const {
  const auto c = cumulative(g);
  double s = 0.0;
  for (int p = 0; p < pairs_; ++p) s += coeff[p] * c[p];
  return s;
}

double QuadratureGrid::invert(std::span<const double> coeff, double u) const {
  const double total = cdf_at(points_ - 1, coeff);
  const double target = u * total;
  int lo = 0;
  int hi = points_ - 1;
  while (hi - lo > 1) {
    const int midpoint = (lo + hi) / 2;
    if (cdf_at(midpoint, coeff) <= target) {
      lo = midpoint;
    } else {
      hi = midpoint;
    }
  }
  const double f_lo = cdf_at(lo, coeff);
  const double f_hi = cdf_at(hi, coeff);
  const double t = f_hi > f_lo ? std::clamp((target - f_lo) / (f_hi - f_lo), 0.0, 1.0) : 0.5;
  return x(lo) + t * step_;
}

}  // namespace homowit
