// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/homodyne.hpp"

#include "homowit/parallel.hpp"
#include "homowit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace homowit {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kEventsPerChunk = 8192;

void require_physical(const BipartiteFockState& rho, const char* where) {
  if (!rho.is_physical()) {
    std::ostringstream os;
    os << where << ": state is not physical (min eigenvalue " << rho.min_eigenvalue() << ")";
    throw std::invalid_argument(os.str());
  }
}

using PhaseTable = std::array<Complex, 2 * kMaxModeDim - 1>;

// e^{i phi k} for k = -(n-1)..(n-1), stored at offset n-1.
PhaseTable phase_powers(double phi, int n) {
  PhaseTable out{};
  const Complex unit = std::polar(1.0, phi);
  out[n - 1] = 1.0;
  for (int k = 1; k < n; ++k) {
    out[n - 1 + k] = out[n - 2 + k] * unit;
    out[n - 1 - k] = std::conj(out[n - 1 + k]);
  }
  return out;
}

// int over the half line selected by outcome (0: x >= 0, 1: x < 0).
double half_overlap(int outcome, int n, int m) {
  const double g = half_line_overlap(n, m);
  return outcome == 0 ? g : ((n + m) % 2 == 0 ? g : -g);
}

}  // namespace

MeasurementConfig::MeasurementConfig() : delta_phi{-kPi / 4, kPi / 4, kPi / 4, 3 * kPi / 4} {}

int MeasurementConfig::slot(SettingPair pair) {
  if ((pair.a != 1 && pair.a != 2) || (pair.b != 1 && pair.b != 2)) {
    std::ostringstream os;
    os << "unknown setting pair (" << pair.a << "," << pair.b << ")";
    throw std::invalid_argument(os.str());
  }
  return (pair.a - 1) * 2 + (pair.b - 1);
}

double MeasurementConfig::relative_phase(SettingPair pair) const {
  const int s = slot(pair);
  return delta_phi[s] + angle_error[s];
}

void MeasurementConfig::set_two_correlator_errors(double eps11, double eps12) {
  angle_error = {eps11, eps12, eps12, eps11};
}

JointQuadratureDensity::JointQuadratureDensity(const BipartiteFockState& rho, double phi_a, double phi_b)
    : dim_a_(rho.dim_a()), dim_b_(rho.dim_b()), kernel_(rho.dim(), rho.dim()) {
  for (int i = 0; i < dim_a_; ++i)
    for (int j = 0; j < dim_b_; ++j)
      for (int k = 0; k < dim_a_; ++k)
        for (int l = 0; l < dim_b_; ++l) {
          const Complex phase = std::polar(1.0, phi_a * (i - k) + phi_b * (j - l));
          kernel_(rho.index(i, j), rho.index(k, l)) = (rho.element(i, j, k, l) * phase).real();
        }
}

double JointQuadratureDensity::operator()(double x_a, double x_b) const {
  std::vector<double> fa(dim_a_), fb(dim_b_);
  hermite_functions(x_a, fa);
  hermite_functions(x_b, fb);
  Eigen::VectorXd u(dim_a_ * dim_b_);
  for (int i = 0; i < dim_a_; ++i)
    for (int j = 0; j < dim_b_; ++j) u(i * dim_b_ + j) = fa[i] * fb[j];
  return u.dot(kernel_ * u);
}

JointQuadratureDensity joint_quadrature_density(const BipartiteFockState& rho, double phi_a, double phi_b) {
  require_physical(rho, "joint_quadrature_density");
  return JointQuadratureDensity(rho, phi_a, phi_b);
}

EventSampler::EventSampler(const BipartiteFockState& rho, double lo, double hi, int points)
    : dim_a_(rho.dim_a()),
      dim_b_(rho.dim_b()),
      matrix_(rho.matrix()),
      reduced_a_(rho.reduced(Party::A)),
      grid_(std::max(rho.dim_a(), rho.dim_b()) - 1, lo, hi, points) {
  require_physical(rho, "EventSampler");
}

std::pair<double, double> EventSampler::sample(double phi_a, double phi_b, double u_a, double u_b) const {
  std::array<double, kMaxModeDim * (kMaxModeDim + 1) / 2> coeff{};
  const std::span<const double> cspan(coeff.data(), grid_.pair_count());
  const auto pa = phase_powers(phi_a, dim_a_);
  const auto pb = phase_powers(phi_b, dim_b_);

  for (int i = 0; i < dim_a_; ++i)
    for (int k = i; k < dim_a_; ++k) {
      const double w = (reduced_a_(i, k) * pa[i - k + dim_a_ - 1]).real();
      coeff[grid_.pair_index(i, k)] = i == k ? w : 2.0 * w;
    }
  const double x_a = grid_.invert(cspan, u_a);
  if (!std::isfinite(x_a)) throw std::runtime_error("sampler produced a non-finite quadrature");

  std::array<double, kMaxModeDim> fa{};
  hermite_functions(x_a, std::span<double>(fa.data(), dim_a_));
  // Conditional kernel for mode B given x_a.
  coeff.fill(0.0);
  for (int j = 0; j < dim_b_; ++j)
    for (int l = j; l < dim_b_; ++l) {
      Complex m = 0.0;
      for (int i = 0; i < dim_a_; ++i)
        for (int k = 0; k < dim_a_; ++k)
          m += matrix_(i * dim_b_ + j, k * dim_b_ + l) * pa[i - k + dim_a_ - 1] * (fa[i] * fa[k]);
      const double w = (m * pb[j - l + dim_b_ - 1]).real();
      coeff[grid_.pair_index(j, l)] = j == l ? w : 2.0 * w;
    }
  const double x_b = grid_.invert(cspan, u_b);
  if (!std::isfinite(x_b)) throw std::runtime_error("sampler produced a non-finite quadrature");
  return {x_a, x_b};
}

std::vector<QuadratureRecord> sample_events(const BipartiteFockState& rho, const MeasurementConfig& config,
                                            SettingPair pair, std::size_t n, std::uint64_t seed,
                                            std::int64_t first_event_id) {
  if (n < 1) throw std::invalid_argument("sample_events needs n >= 1");
  const double dphi = config.relative_phase(pair);
  const EventSampler sampler(rho);
  std::vector<QuadratureRecord> out(n);
  const std::size_t chunks = (n + kEventsPerChunk - 1) / kEventsPerChunk;
  const auto stream = static_cast<std::uint64_t>(MeasurementConfig::slot(pair));
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = make_stream(seed, stream, c);
    const std::size_t begin = c * kEventsPerChunk;
    const std::size_t end = std::min(n, begin + kEventsPerChunk);
    for (std::size_t e = begin; e < end; ++e) {
      const double phase = config.phase_averaging ? 2.0 * kPi * unit_uniform(rng) : 0.0;
      const double u_a = unit_uniform(rng);
      const double u_b = unit_uniform(rng);
      const auto [x_a, x_b] = sampler.sample(phase, phase - dphi, u_a, u_b);
      out[e] = {first_event_id + static_cast<std::int64_t>(e), pair.a, pair.b, x_a, x_b};
    }
  });
  return out;
}

Correlator correlator(std::span<const QuadratureRecord> records) {
  if (records.size() < 2) throw std::invalid_argument("correlator needs at least 2 records");
  const int sa = records.front().setting_a;
  const int sb = records.front().setting_b;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.setting_a != sa || r.setting_b != sb) {
      throw std::invalid_argument("correlator records mix setting pairs");
    }
    sum += sign_bin(r.x_a) * sign_bin(r.x_b);
  }
  const double n = static_cast<double>(records.size());
  const double mean = sum / n;
  // Products are +-1, so the sample variance is n/(n-1) (1 - mean^2).
  const double var = std::max(0.0, (1.0 - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n), records.size()};
}

ChshEstimate chsh_from_two_correlators(const Correlator& e11, const Correlator& e12) {
  ChshEstimate out;
  out.e11 = e11;
  out.e12 = e12;
  out.s_obs = 2.0 * e11.value + 2.0 * e12.value;
  out.s_stderr = 2.0 * std::hypot(e11.std_error, e12.std_error);
  return out;
}

SignTable sign_probabilities_at(const BipartiteFockState& rho, double phi_a, double phi_b) {
  SignTable t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Complex s = 0.0;
      for (int i = 0; i < rho.dim_a(); ++i)
        for (int j = 0; j < rho.dim_b(); ++j)
          for (int k = 0; k < rho.dim_a(); ++k)
            for (int l = 0; l < rho.dim_b(); ++l) {
              const double ga = half_overlap(a, i, k);
              const double gb = half_overlap(b, j, l);
              if (ga == 0.0 || gb == 0.0) continue;
              s += rho.element(i, j, k, l) * std::polar(1.0, phi_a * (i - k) + phi_b * (j - l)) * (ga * gb);
            }
      t.p[a][b] = s.real();
    }
  return t;
}

SignTable analytic_sign_probabilities(const BipartiteFockState& rho, double delta_phi) {
  SignTable t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Complex s = 0.0;
      for (int i = 0; i < rho.dim_a(); ++i)
        for (int j = 0; j < rho.dim_b(); ++j)
          for (int k = 0; k < rho.dim_a(); ++k) {
            // Phase averaging keeps only i + j = k + l.
            const int l = i + j - k;
            if (l < 0 || l >= rho.dim_b()) continue;
            const double ga = half_overlap(a, i, k);
            const double gb = half_overlap(b, j, l);
            if (ga == 0.0 || gb == 0.0) continue;
            s += rho.element(i, j, k, l) * std::polar(1.0, delta_phi * (i - k)) * (ga * gb);
          }
      t.p[a][b] = s.real();
    }
  return t;
}

double analytic_correlator(const BipartiteFockState& rho, double delta_phi) {
  return analytic_sign_probabilities(rho, delta_phi).correlator();
}

double analytic_chsh(const BipartiteFockState& rho, const MeasurementConfig& config) {
  auto e = [&](int a, int b) {
    const double dphi = config.relative_phase({a, b});
    if (config.phase_averaging) return analytic_correlator(rho, dphi);
    return sign_probabilities_at(rho, 0.0, -dphi).correlator();
  };
  return e(1, 1) + e(1, 2) + e(2, 1) - e(2, 2);
}

double analytic_sign_mean(const CMatrix& single_mode, double phase) {
  if (single_mode.rows() != single_mode.cols()) throw std::invalid_argument("single-mode matrix must be square");
  const int d = static_cast<int>(single_mode.rows());
  Complex s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      if ((i + k) % 2 == 0) continue;  // even products integrate to the same on both half-lines
      s += single_mode(i, k) * std::polar(1.0, phase * (i - k)) * (2.0 * half_line_overlap(i, k));
    }
  return s.real();
}

}  // namespace homowit
