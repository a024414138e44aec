// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kInf = std::numeric_limits<double>::infinity();

Complex gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return {nd(rng), nd(rng)};
}

// Draws a unit vector; each component is zeroed with probability 1/4 and
// with probability 3/4 all phases are dropped.
Eigen::VectorXcd sparse_unit(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> ud;
  const bool real = ud(rng) < 0.75;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const Complex z = gaussian(rng);
    v(i) = real ? Complex(std::abs(z.real()), 0.0) : z;
    if (ud(rng) < 0.25) v(i) = 0.0;
  }
  if (v.norm() < 1e-12) v(static_cast<int>(rng() % n)) = 1.0;
  return v / v.norm();
}

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double phi(int n, double x) {
  const double norm = std::sqrt(std::ldexp(1.0, n) * boost::math::factorial<double>(n) * std::sqrt(std::numbers::pi));
  return boost::math::hermite(static_cast<unsigned>(n), x) * std::exp(-0.5 * x * x) / norm;
}

double integrate_line(const std::function<double(double)>& f) { return GK::integrate(f, -kInf, kInf, 8, 1e-13); }

double integrate_half_line(const std::function<double(double)>& f) { return GK::integrate(f, 0.0, kInf, 8, 1e-13); }

double joint_density(const BipartiteFockState& rho, double phi_a, double phi_b, double x_a, double x_b) {
  const int da = rho.dim_a();
  const int db = rho.dim_b();
  std::vector<double> fa(da), fb(db);
  for (int i = 0; i < da; ++i) fa[i] = phi(i, x_a);
  for (int j = 0; j < db; ++j) fb[j] = phi(j, x_b);
  Complex sum = 0.0;
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k)
        for (int l = 0; l < db; ++l) {
          const Complex phase = std::polar(1.0, phi_a * (i - k) + phi_b * (j - l));
          sum += rho.element(i, j, k, l) * phase * fa[i] * fa[k] * fb[j] * fb[l];
        }
  return sum.real();
}

std::array<std::array<double, 2>, 2> quadrant_probabilities(const BipartiteFockState& rho, double delta_phi,
                                                            int phases) {
  // Phase-averaged density as a real kernel on (i, k) x (j, l): averaging
  // before integrating is exact because both operations are linear.
  const int da = rho.dim_a();
  const int db = rho.dim_b();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(da * da, db * db);
  for (int s = 0; s < phases; ++s) {
    const double phase = 2.0 * std::numbers::pi * s / phases;
    const double phi_a = phase;
    const double phi_b = phase - delta_phi;
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < db; ++j)
        for (int k = 0; k < da; ++k)
          for (int l = 0; l < db; ++l) {
            const Complex w = std::polar(1.0, phi_a * (i - k) + phi_b * (j - l));
            kernel(i * da + k, j * db + l) += (rho.element(i, j, k, l) * w).real() / phases;
          }
  }
  auto density = [&](double x_a, double x_b) {
    double sum = 0.0;
    for (int i = 0; i < da; ++i)
      for (int k = 0; k < da; ++k) {
        const double fa = phi(i, x_a) * phi(k, x_a);
        for (int j = 0; j < db; ++j)
          for (int l = 0; l < db; ++l) sum += kernel(i * da + k, j * db + l) * fa * phi(j, x_b) * phi(l, x_b);
      }
    return sum;
  };
  std::array<std::array<double, 2>, 2> out{};
  const double lo[2] = {0.0, -kInf};
  const double hi[2] = {kInf, 0.0};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      auto outer = [&](double x_a) {
        return GK::integrate([&](double x_b) { return density(x_a, x_b); }, lo[b], hi[b], 6, 1e-13);
      };
      out[a][b] = GK::integrate(outer, lo[a], hi[a], 6, 1e-13);
    }
  return out;
}

CMatrix random_single_mode(std::mt19937_64& rng, int dim, int rank) {
  CMatrix g(dim, rank);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < rank; ++c) g(r, c) = gaussian(rng);
  CMatrix m = g * g.adjoint();
  return m / m.trace().real();
}

BipartiteFockState random_state(std::mt19937_64& rng, int dim_a, int dim_b, int rank) {
  return BipartiteFockState(dim_a, dim_b, random_single_mode(rng, dim_a * dim_b, rank));
}

BipartiteFockState random_separable(std::mt19937_64& rng, int dim, int terms) {
  std::uniform_real_distribution<double> ud;
  CMatrix acc = CMatrix::Zero(dim * dim, dim * dim);
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    const double w = ud(rng);
    const CMatrix a = random_single_mode(rng, dim, 1 + static_cast<int>(rng() % dim));
    const CMatrix b = random_single_mode(rng, dim, 1 + static_cast<int>(rng() % dim));
    acc += w * BipartiteFockState::product(a, b).matrix();
    total += w;
  }
  return BipartiteFockState(dim, dim, acc / total);
}

// Indices on the 3x3 space: |ij> -> 3i + j.
double coherence_objective(const CMatrix& rho9) {
  const double k1 = 16.0 / (std::numbers::sqrt2 * std::numbers::pi);
  const double k2 = 8.0 / std::numbers::pi;
  return k1 * rho9(1, 3).real() + k2 * (rho9(6, 4).real() + rho9(2, 4).real());
}

double best_separable_draw(double p, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr int kBins = 2000;
  std::vector<double> best_f(kBins + 1, -kInf), best_t(kBins + 1, 0.0);
  for (int d = 0; d < draws; ++d) {
    const Eigen::VectorXcd a = sparse_unit(rng, 3);
    const Eigen::VectorXcd b = sparse_unit(rng, 3);
    Eigen::VectorXcd psi(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) psi(3 * i + j) = a(i) * b(j);
    const CMatrix rho = psi * psi.adjoint();
    const double f = coherence_objective(rho);
    const double t = 1.0 - (std::norm(a(0)) + std::norm(a(1))) * (std::norm(b(0)) + std::norm(b(1)));
    const auto bin = static_cast<std::size_t>(std::lround(t * kBins));
    if (f > best_f[bin]) {
      best_f[bin] = f;
      best_t[bin] = t;
    }
  }
  // Two product states mixed with weights fixed by the tail weight.
  double best = -kInf;
  for (int i = 0; i <= kBins; ++i) {
    if (best_f[i] == -kInf || best_t[i] > p) continue;
    if (best_t[i] == p) best = std::max(best, best_f[i]);
    for (int j = 0; j <= kBins; ++j) {
      if (best_f[j] == -kInf || best_t[j] <= p) continue;
      const double lambda = (best_t[j] - p) / (best_t[j] - best_t[i]);
      best = std::max(best, lambda * best_f[i] + (1.0 - lambda) * best_f[j]);
    }
  }
  return best + 2.0 * std::numbers::sqrt2 * p;
}

double best_qubit_separable_draw(double p, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud;
  const double k1 = 16.0 / (std::numbers::sqrt2 * std::numbers::pi);
  const double k2 = 8.0 / std::numbers::pi;
  // Qubit basis |00>,|01>,|10>,|11>; tail basis |02>,|12>,|20>,|21>,|22>.
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 5);
  v(3, 0) = k2;  // <02|rho|11>
  v(3, 2) = k2;  // <20|rho|11>
  double best = -kInf;
  for (int d = 0; d < draws; ++d) {
    const int terms = ud(rng) < 0.6 ? 1 : 2;
    CMatrix q = CMatrix::Zero(4, 4);
    std::vector<double> w(terms);
    double wsum = 0.0;
    for (double& x : w) wsum += (x = ud(rng));
    for (int k = 0; k < terms; ++k) {
      const Eigen::VectorXcd a = sparse_unit(rng, 2);
      const Eigen::VectorXcd b = sparse_unit(rng, 2);
      Eigen::VectorXcd s(4);
      s << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
      q += (1.0 - p) * w[k] / wsum * s * s.adjoint();
    }
    const Eigen::VectorXcd t1 = sparse_unit(rng, 5);
    CMatrix t = p * t1 * t1.adjoint();
    if (ud(rng) < 0.4) {
      const Eigen::VectorXcd t2 = sparse_unit(rng, 5);
      const double u = ud(rng);
      t = p * (u * t1 * t1.adjoint() + (1.0 - u) * t2 * t2.adjoint());
    }
    // max Re tr(V^T K) over coherence blocks K = Q^1/2 C T^1/2, |C| <= 1.
    const CMatrix m = psd_sqrt(q) * v.cast<Complex>() * psd_sqrt(t);
    const double coherence = Eigen::JacobiSVD<CMatrix>(m).singularValues().sum();
    best = std::max(best, k1 * q(1, 2).real() + coherence);
  }
  return best + 2.0 * std::numbers::sqrt2 * p;
}

}  // namespace oracle
