// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file homodyne.hpp
 * @brief Phase-averaged local homodyne measurements with sign binning.
 *
 * Phase convention: measuring the rotated quadrature X_phi on a mode with
 * matrix elements rho_ik contributes e^{+i phi (i-k)} phi_i(x) phi_k(x) to
 * the outcome density. With the relative phase dphi = phi_a - phi_b and the
 * default setting table, the state (|01> + |10>)/sqrt(2) gives
 * S = +4 sqrt(2)/pi.
 */

#pragma once

#include "homowit/fock.hpp"
#include "homowit/hermite.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace homowit {

/// Measurement choice of each party, both in {1, 2}.
struct SettingPair {
  int a = 1;
  int b = 1;
  friend bool operator==(const SettingPair&, const SettingPair&) = default;
};

struct MeasurementConfig {
  /// Relative phase phi_a - phi_b per setting pair, indexed by slot().
  std::array<double, 4> delta_phi;
  /// Additive calibration error per setting pair, radians.
  std::array<double, 4> angle_error{};
  bool phase_averaging = true;

  MeasurementConfig();

  static int slot(SettingPair pair);
  double relative_phase(SettingPair pair) const;
  /// Sets eps11 on pairs (1,1) and (2,2) and eps12 on (1,2) and (2,1).
  void set_two_correlator_errors(double eps11, double eps12);
};

/// One heralded event.
struct QuadratureRecord {
  std::int64_t event_id = 0;
  int setting_a = 1;
  int setting_b = 1;
  double x_a = 0.0;
  double x_b = 0.0;
  friend bool operator==(const QuadratureRecord&, const QuadratureRecord&) = default;
};

struct Correlator {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_events = 0;
};

struct ChshEstimate {
  Correlator e11;
  Correlator e12;
  double s_obs = 0.0;
  double s_stderr = 0.0;
};

/// Sign-binned outcome probabilities; index 0 is outcome +1, index 1 is -1.
struct SignTable {
  std::array<std::array<double, 2>, 2> p{};
  double correlator() const { return p[0][0] + p[1][1] - p[0][1] - p[1][0]; }
  double total() const { return p[0][0] + p[0][1] + p[1][0] + p[1][1]; }
};

/// p(x_a, x_b) at fixed local-oscillator phases.
class JointQuadratureDensity {
 public:
  JointQuadratureDensity(const BipartiteFockState& rho, double phi_a, double phi_b);
  double operator()(double x_a, double x_b) const;

 private:
  int dim_a_;
  int dim_b_;
  Eigen::MatrixXd kernel_;  // Re of the phased density matrix
};

/// Rejects non-physical states.
JointQuadratureDensity joint_quadrature_density(const BipartiteFockState& rho, double phi_a, double phi_b);

/// Draws (x_a, x_b) from the joint density by conditional inverse CDF on a
/// fixed grid. Holds no mutable state; safe to share between threads.
class EventSampler {
 public:
  explicit EventSampler(const BipartiteFockState& rho, double lo = -6.0, double hi = 6.0,
                        int points = 2048);

  /// u_a, u_b uniform in [0, 1).
  std::pair<double, double> sample(double phi_a, double phi_b, double u_a, double u_b) const;

 private:
  int dim_a_;
  int dim_b_;
  CMatrix matrix_;
  CMatrix reduced_a_;
  QuadratureGrid grid_;
};

/// Simulates n events of one setting pair. Each event draws a common phase
/// uniformly in [0, 2 pi) and measures phi_a = phase,
/// phi_b = phase - delta_phi - angle_error. Deterministic for a given seed,
/// independent of the number of worker threads.
std::vector<QuadratureRecord> sample_events(const BipartiteFockState& rho, const MeasurementConfig& config,
                                            SettingPair pair, std::size_t n, std::uint64_t seed,
                                            std::int64_t first_event_id = 0);

/// -1 for x < 0, +1 otherwise.
inline int sign_bin(double x) { return x < 0.0 ? -1 : 1; }

/// Mean of sign(x_a) sign(x_b) over records of a single setting pair.
Correlator correlator(std::span<const QuadratureRecord> records);

/// S_obs = 2 E11 + 2 E12 with errors combined in quadrature.
ChshEstimate chsh_from_two_correlators(const Correlator& e11, const Correlator& e12);

/// Sign-binned probabilities at fixed phases (no averaging).
SignTable sign_probabilities_at(const BipartiteFockState& rho, double phi_a, double phi_b);

/// Closed form with the common phase averaged out: only c_ijkl with
/// i + j = k + l survive.
SignTable analytic_sign_probabilities(const BipartiteFockState& rho, double delta_phi);

double analytic_correlator(const BipartiteFockState& rho, double delta_phi);

/// E11 + E12 + E21 - E22 with the relative phases (and angle errors) of config.
double analytic_chsh(const BipartiteFockState& rho, const MeasurementConfig& config = {});

/// <sign(X_phase)> for a single mode.
double analytic_sign_mean(const CMatrix& single_mode, double phase = 0.0);

}  // namespace homowit
