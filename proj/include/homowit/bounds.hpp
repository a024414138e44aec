// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bounds.hpp
 * @brief Separable CHSH bounds in the two-photon-truncated space and the
 * witness verdict.
 *
 * The bounded objective is
 *
 *   S_max = (4/pi) Re[<10|rho|01> (C + iD)]
 *         + (4/(sqrt2 pi)) Re[(<20|rho|11> + <11|rho|02>) (C + iD)]
 *         + 2 sqrt2 p(n_A >= 2 or n_B >= 2)
 *
 * with C = 2(cos(e11 - pi/4) + cos(e12 + pi/4)) and
 * D = 2(sin(e11 - pi/4) + sin(e12 + pi/4)). At zero angle error C = 2 sqrt2
 * and D = 0. The optimization runs over 9x9 matrices on {0,1,2}^2.
 */

#pragma once

#include "homowit/fock.hpp"
#include "homowit/sdp.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace homowit {

inline constexpr int kBoundModeDim = 3;
inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;
inline constexpr double kDefaultAngleErrorBound = std::numbers::pi / 180.0;

enum class BoundMode { QubitSubspacePpt, FullPpt, Experiment };
enum class PptScope { QubitSubspace, Full };

const char* to_string(BoundMode mode);
const char* to_string(PptScope scope);
/// Accepts "qubit-subspace-ppt", "full-ppt", "experiment".
BoundMode parse_bound_mode(std::string_view text);

/// Local photon-number probabilities for levels 0, 1 and >1 with errors.
struct LocalMarginals {
  std::array<double, 3> p_a{};
  std::array<double, 3> p_b{};
  std::array<double, 3> delta_a{};
  std::array<double, 3> delta_b{};
};

struct AngleCoefficients {
  double c = 0.0;
  double d = 0.0;
};

AngleCoefficients angle_error_coefficients(double eps11, double eps12);

/// Hermitian W on the 9x9 space with Re tr(W rho) equal to the coherence
/// part of S_max.
CMatrix s_max_weight(double eps11 = 0.0, double eps12 = 0.0);

/// S_max for a 9x9 matrix and tail weight p_geq2.
double s_max_objective(const CMatrix& rho, double p_geq2, double eps11 = 0.0, double eps12 = 0.0);

struct BoundRequest {
  double p_star = 0.0;
  BoundMode mode = BoundMode::QubitSubspacePpt;
  /// Experiment mode only.
  double delta_p_star = 0.0;
  std::optional<LocalMarginals> marginals;
  PptScope experiment_ppt = PptScope::QubitSubspace;
  /// Half-width of the angle-error interval; experiment mode evaluates the
  /// corner (+bound, -bound).
  double angle_error_bound = kDefaultAngleErrorBound;
  /// Explicit (e11, e12), overriding the mode's default.
  std::optional<std::array<double, 2>> angle_errors;
  sdp::SolverOptions solver;
};

struct ConstraintActivity {
  std::string label;
  /// Scalar constraints: slack. PSD constraints: minimal eigenvalue.
  double slack = 0.0;
  double multiplier = 0.0;
  bool active = false;
};

struct SeparableBoundResult {
  /// min(optimum, 2 sqrt2): no state exceeds 2 sqrt2, while the relaxed
  /// objective can for intermediate p*.
  double s_sep_max = 0.0;
  double s_sep_max_raw = 0.0;
  double dual_bound = 0.0;
  CMatrix optimizer;
  double eps11 = 0.0;
  double eps12 = 0.0;
  double tail_constant = 0.0;
  double p_star = 0.0;
  bool p_star_clipped = false;
  sdp::Status status = sdp::Status::NumericalError;
  std::string message;
  double gap = 0.0;
  int iterations = 0;
  std::vector<ConstraintActivity> constraints;

  bool ok() const { return status == sdp::Status::Optimal; }
};

/// Builds the SDP for a request without solving it. The variable lives on
/// the Fock indices listed in support (all nine unless rows are forced to
/// vanish by the constraints).
sdp::SdpProblem build_bound_problem(const BoundRequest& request, double* tail_constant = nullptr,
                                    std::vector<int>* support = nullptr);

/// Throws std::invalid_argument for p_star > 1, non-finite input or
/// marginals outside [0, 1]. Non-optimal solver status is returned, not
/// thrown.
SeparableBoundResult separable_bound(const BoundRequest& request);

struct CornerCheck {
  std::array<std::array<double, 2>, 4> corners{};
  std::array<double, 4> values{};
  int argmax = 0;
  /// True when (+bound, -bound) attains the maximum within 1e-7.
  bool extremal = false;
};

/// Solves the experiment-mode problem at all four angle corners.
CornerCheck angle_corner_check(const BoundRequest& request);

enum class Conclusion { SinglePhotonEntangled, EntangledSubspaceUnknown, Inconclusive };

const char* to_string(Conclusion conclusion);

struct WitnessVerdict {
  double s_obs = 0.0;
  double s_stderr = 0.0;
  double bound_qubit_ppt = 0.0;
  double bound_full_ppt = 0.0;
  Conclusion conclusion = Conclusion::Inconclusive;
  /// (s_obs - bound) / s_stderr; infinite when s_stderr is 0.
  double margin_qubit_sigma = 0.0;
  double margin_full_sigma = 0.0;
};

/// Throws std::invalid_argument when s_obs exceeds 2 sqrt2 or any input is
/// not finite.
WitnessVerdict verdict(double s_obs, double s_stderr, double bound_qubit_ppt, double bound_full_ppt);

}  // namespace homowit
