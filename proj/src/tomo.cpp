// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/tomo.hpp"

#include "homowit/hermite.hpp"
#include "homowit/log.hpp"
#include "homowit/parallel.hpp"
#include "homowit/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace homowit {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kSupport = 10.0;
constexpr std::size_t kMinSamples = 1000;
constexpr int kGramPoints = 4801;
constexpr double kGramHalfWidth = 12.0;

// Inverse-CDF tables of phi_n^2 for each level, on the sampler grid.
class DiagonalSampler {
 public:
  explicit DiagonalSampler(std::span<const double> diagonals) : grid_(static_cast<int>(diagonals.size()) - 1) {
    const int levels = static_cast<int>(diagonals.size());
    level_cdf_.resize(levels);
    double acc = 0.0;
    for (int n = 0; n < levels; ++n) {
      acc += std::max(0.0, diagonals[n]);
      level_cdf_[n] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("diagonal distribution has no positive weight");
    for (auto& c : level_cdf_) c /= acc;
    tables_.resize(levels);
    for (int n = 0; n < levels; ++n) {
      const int p = grid_.pair_index(n, n);
      auto& t = tables_[n];
      t.resize(grid_.points());
      for (int g = 0; g < grid_.points(); ++g) t[g] = grid_.cumulative(g)[p];
      const double total = t.back();
      for (auto& v : t) v /= total;
    }
  }

  double draw(double u_level, double u_x) const {
    const auto level = static_cast<std::size_t>(
        std::upper_bound(level_cdf_.begin(), level_cdf_.end() - 1, u_level) - level_cdf_.begin());
    const auto& t = tables_[level];
    auto it = std::upper_bound(t.begin(), t.end(), u_x);
    const int hi = std::clamp(static_cast<int>(it - t.begin()), 1, grid_.points() - 1);
    const int lo = hi - 1;
    const double span = t[hi] - t[lo];
    const double frac = span > 0.0 ? std::clamp((u_x - t[lo]) / span, 0.0, 1.0) : 0.5;
    return grid_.x(lo) + frac * grid_.step();
  }

 private:
  QuadratureGrid grid_;
  std::vector<double> level_cdf_;
  std::vector<std::vector<double>> tables_;
};

std::vector<double> normalized_diagonals(std::span<const double> diagonals) {
  std::vector<double> d(diagonals.begin(), diagonals.end());
  for (auto& v : d) v = std::max(0.0, v);
  const double s = std::accumulate(d.begin(), d.end(), 0.0);
  if (!(s > 0.0)) throw std::invalid_argument("diagonal distribution has no positive weight");
  for (auto& v : d) v /= s;
  return d;
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (v.size() - 1));
}

}  // namespace

ReconstructionKernel::ReconstructionKernel(int n_max, int guard, Eigen::MatrixXd coeff, double condition)
    : n_max_(n_max), guard_(guard), support_(kSupport), condition_(condition), coeff_(std::move(coeff)) {}

ReconstructionKernel ReconstructionKernel::build(int n_max, int guard) {
  if (n_max < 0 || n_max > kMaxTomoLevels) {
    std::ostringstream os;
    os << "kernel n_max must lie in [0, " << kMaxTomoLevels << "], got " << n_max;
    throw std::invalid_argument(os.str());
  }
  if (guard < 0) throw std::invalid_argument("guard must be nonnegative");
  const int basis = n_max + guard + 1;

  // Gram matrix of phi_m^2; the integrand is a polynomial times exp(-2x^2),
  // so the trapezoid rule converges spectrally.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis, basis);
  const double h = 2.0 * kGramHalfWidth / (kGramPoints - 1);
  std::vector<double> phi(basis);
  for (int g = 0; g < kGramPoints; ++g) {
    hermite_functions(-kGramHalfWidth + h * g, phi);
    for (int a = 0; a < basis; ++a)
      for (int b = a; b < basis; ++b) gram(a, b) += h * phi[a] * phi[a] * phi[b] * phi[b];
  }
  gram = gram.selfadjointView<Eigen::Upper>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const auto& ev = es.eigenvalues();
  const double condition = ev.maxCoeff() / ev.minCoeff();
  if (!(ev.minCoeff() > 0.0) || condition > kMaxCondition) {
    std::ostringstream os;
    os << "reconstruction kernel is ill-conditioned (condition number " << condition << ")";
    throw std::runtime_error(os.str());
  }
  const Eigen::MatrixXd inverse = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return ReconstructionKernel(n_max, guard, inverse.topRows(n_max + 1), condition);
}

double ReconstructionKernel::operator()(int n, double x) const {
  if (n < 0 || n > n_max_) throw std::out_of_range("kernel index outside [0, n_max]");
  std::array<double, kMaxTomoLevels + 1> out{};
  evaluate(x, std::span<double>(out.data(), n_max_ + 1));
  return out[n];
}

void ReconstructionKernel::evaluate(double x, std::span<double> out) const {
  const int basis = static_cast<int>(coeff_.cols());
  if (std::abs(x) > support_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::array<double, 64> phi{};
  if (basis > static_cast<int>(phi.size())) throw std::logic_error("kernel basis too large");
  hermite_functions(x, std::span<double>(phi.data(), basis));
  for (int m = 0; m < basis; ++m) phi[m] *= phi[m];
  for (int n = 0; n <= n_max_; ++n) {
    double s = 0.0;
    for (int m = 0; m < basis; ++m) s += coeff_(n, m) * phi[m];
    out[n] = s;
  }
}

double ReconstructionKernel::moment(int n, int m) const {
  const int points = 8001;
  const double h = 2.0 * support_ / (points - 1);
  double s = 0.0;
  for (int g = 0; g < points; ++g) {
    const double x = -support_ + h * g;
    const double w = (g == 0 || g == points - 1) ? 0.5 : 1.0;
    const double p = hermite_function(m, x);
    s += w * h * (*this)(n, x) * p * p;
  }
  return s;
}

std::vector<double> ReconstructionKernel::tabulate(int n, int points) const {
  std::vector<double> out(points);
  const double h = 2.0 * support_ / (points - 1);
  for (int g = 0; g < points; ++g) out[g] = (*this)(n, -support_ + h * g);
  return out;
}

std::vector<double> PhotonNumberDistribution::clipped() const {
  std::vector<double> out(p);
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

PhotonNumberDistribution estimate_distribution(std::span<const double> samples, const ReconstructionKernel& kernel,
                                               Party party) {
  if (samples.size() < kMinSamples) {
    std::ostringstream os;
    os << "photon-number estimation needs at least " << kMinSamples << " samples, got " << samples.size();
    throw std::invalid_argument(os.str());
  }
  const int levels = kernel.n_max() + 1;
  PhotonNumberDistribution d;
  d.party = party;
  d.p.assign(levels, 0.0);
  d.n_samples = samples.size();
  std::array<double, kMaxTomoLevels + 1> f{};
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite quadrature sample");
    if (std::abs(x) > kernel.support()) {
      ++d.outside_support;
      continue;
    }
    kernel.evaluate(x, std::span<double>(f.data(), levels));
    for (int n = 0; n < levels; ++n) d.p[n] += f[n];
  }
  for (auto& v : d.p) v /= static_cast<double>(samples.size());
  if (d.outside_support > 0) {
    std::ostringstream os;
    os << d.outside_support << " samples lie outside the kernel support |x| <= " << kernel.support()
       << " and were counted as zero";
    warn(os.str());
  }
  d.p_tail = 1.0 - d.p[0] - (levels > 1 ? d.p[1] : 0.0);
  d.has_negative = std::any_of(d.p.begin(), d.p.end(), [](double v) { return v < 0.0; });
  return d;
}

PStar p_star(const PhotonNumberDistribution& a, const PhotonNumberDistribution& b) {
  if (a.p.size() < 2 || b.p.size() < 2) throw std::invalid_argument("p_star needs p(0) and p(1) for both parties");
  PStar out;
  out.raw = 2.0 - (a.p[0] + a.p[1] + b.p[0] + b.p[1]);
  out.clipped = out.raw < 0.0;
  out.value = std::max(0.0, out.raw);
  if (a.delta_p.size() >= 2 && b.delta_p.size() >= 2) {
    out.delta = a.delta_p[0] + a.delta_p[1] + b.delta_p[0] + b.delta_p[1];
  }
  return out;
}

std::vector<double> sample_diagonal_quadratures(std::span<const double> diagonals, std::size_t n,
                                                std::uint64_t seed, std::uint64_t stream) {
  if (diagonals.empty() || static_cast<int>(diagonals.size()) > kMaxModeDim + 1) {
    throw std::invalid_argument("diagonal distribution must have 1..7 levels");
  }
  const DiagonalSampler sampler(diagonals);
  auto rng = make_stream(seed, stream);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double u_level = unit_uniform(rng);
    x = sampler.draw(u_level, unit_uniform(rng));
  }
  return out;
}

BootstrapErrors bootstrap_errors(std::span<const double> diagonals, std::size_t n_samples,
                                 const ReconstructionKernel& kernel, int rounds, std::uint64_t seed) {
  if (rounds < 2) throw std::invalid_argument("bootstrap needs at least 2 rounds");
  if (n_samples < kMinSamples) throw std::invalid_argument("bootstrap needs at least 1000 samples per round");
  const auto d = normalized_diagonals(diagonals);
  if (static_cast<int>(d.size()) > kMaxModeDim + 1) throw std::invalid_argument("too many diagonal levels");
  const DiagonalSampler sampler(d);
  const int levels = kernel.n_max() + 1;
  std::vector<std::vector<double>> estimates(rounds, std::vector<double>(levels, 0.0));

  parallel_for(static_cast<std::size_t>(rounds), [&](std::size_t r) {
    auto rng = make_stream(seed, 0x5eedb007u, r);
    std::array<double, kMaxTomoLevels + 1> f{};
    auto& acc = estimates[r];
    for (std::size_t s = 0; s < n_samples; ++s) {
      const double u_level = unit_uniform(rng);
      const double x = sampler.draw(u_level, unit_uniform(rng));
      kernel.evaluate(x, std::span<double>(f.data(), levels));
      for (int n = 0; n < levels; ++n) acc[n] += f[n];
    }
    for (auto& v : acc) v /= static_cast<double>(n_samples);
  });

  BootstrapErrors out;
  out.rounds = rounds;
  out.delta_p.resize(levels);
  std::vector<double> column(rounds);
  for (int n = 0; n < levels; ++n) {
    for (int r = 0; r < rounds; ++r) column[r] = estimates[r][n];
    out.delta_p[n] = stddev(column);
  }
  for (int r = 0; r < rounds; ++r) column[r] = 1.0 - estimates[r][0] - (levels > 1 ? estimates[r][1] : 0.0);
  out.delta_p_tail = stddev(column);
  return out;
}

PhotonNumberDistribution estimate_with_errors(std::span<const double> samples, const ReconstructionKernel& kernel,
                                              Party party, int rounds, std::uint64_t seed) {
  auto dist = estimate_distribution(samples, kernel, party);
  const auto errors = bootstrap_errors(dist.p, samples.size(), kernel, rounds, seed);
  dist.delta_p = errors.delta_p;
  dist.delta_p_tail = errors.delta_p_tail;
  return dist;
}

}  // namespace homowit
