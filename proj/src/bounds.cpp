// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/bounds.hpp"

#include "homowit/log.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace homowit {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDim = kBoundModeDim * kBoundModeDim;
constexpr double kActiveTol = 1e-6;

int idx(int i, int j) { return i * kBoundModeDim + j; }

void add_coherence(CMatrix& w, int a, int b, Complex kappa) {
  // Re(kappa rho_ab) = Re tr(W rho) with W_ba = kappa/2, W_ab = conj(kappa)/2.
  w(b, a) += kappa / 2.0;
  w(a, b) += std::conj(kappa) / 2.0;
}

void check_probability(double p, const char* what) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    std::ostringstream os;
    os << what << " must lie in [0, 1], got " << p;
    throw std::invalid_argument(os.str());
  }
}

std::array<double, 2> effective_angles(const BoundRequest& r) {
  if (r.angle_errors) return *r.angle_errors;
  if (r.mode == BoundMode::Experiment) return {r.angle_error_bound, -r.angle_error_bound};
  return {0.0, 0.0};
}

}  // namespace

const char* to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::QubitSubspacePpt: return "qubit-subspace-ppt";
    case BoundMode::FullPpt: return "full-ppt";
    case BoundMode::Experiment: return "experiment";
  }
  return "unknown";
}

const char* to_string(PptScope scope) { return scope == PptScope::Full ? "full" : "qubit-subspace"; }

BoundMode parse_bound_mode(std::string_view text) {
  if (text == "qubit-subspace-ppt" || text == "qubit") return BoundMode::QubitSubspacePpt;
  if (text == "full-ppt" || text == "full") return BoundMode::FullPpt;
  if (text == "experiment") return BoundMode::Experiment;
  throw std::invalid_argument("unknown bound mode '" + std::string(text) + "'");
}

const char* to_string(Conclusion conclusion) {
  switch (conclusion) {
    case Conclusion::SinglePhotonEntangled: return "single-photon-entangled";
    case Conclusion::EntangledSubspaceUnknown: return "entangled-subspace-unknown";
    case Conclusion::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

AngleCoefficients angle_error_coefficients(double eps11, double eps12) {
  return {2.0 * (std::cos(eps11 - kPi / 4) + std::cos(eps12 + kPi / 4)),
          2.0 * (std::sin(eps11 - kPi / 4) + std::sin(eps12 + kPi / 4))};
}

CMatrix s_max_weight(double eps11, double eps12) {
  const auto [c, d] = angle_error_coefficients(eps11, eps12);
  const Complex cd(c, d);
  CMatrix w = CMatrix::Zero(kDim, kDim);
  add_coherence(w, idx(1, 0), idx(0, 1), (4.0 / kPi) * cd);
  const Complex k2 = (4.0 / (std::numbers::sqrt2 * kPi)) * cd;
  add_coherence(w, idx(2, 0), idx(1, 1), k2);
  add_coherence(w, idx(1, 1), idx(0, 2), k2);
  return w;
}

double s_max_objective(const CMatrix& rho, double p_geq2, double eps11, double eps12) {
  if (rho.rows() != kDim || rho.cols() != kDim) throw std::invalid_argument("S_max needs a 9x9 matrix");
  return (s_max_weight(eps11, eps12) * rho).trace().real() + kTsirelson * p_geq2;
}

sdp::SdpProblem build_bound_problem(const BoundRequest& r, double* tail_constant, std::vector<int>* support_out) {
  if (!std::isfinite(r.p_star) || r.p_star > 1.0) {
    throw std::invalid_argument("p_star must be finite and at most 1");
  }
  if (!std::isfinite(r.delta_p_star) || r.delta_p_star < 0.0) {
    throw std::invalid_argument("delta_p_star must be finite and non-negative");
  }
  if (!std::isfinite(r.angle_error_bound) || r.angle_error_bound < 0.0) {
    throw std::invalid_argument("angle error bound must be finite and non-negative");
  }
  const double p = std::max(0.0, r.p_star);
  const auto [eps11, eps12] = effective_angles(r);
  const bool experiment = r.mode == BoundMode::Experiment;
  const std::vector<int> qubit = {idx(0, 0), idx(0, 1), idx(1, 0), idx(1, 1)};

  // When the tail weight is forced to 0 the qubit block carries the full
  // trace, so positivity forces every row touching n >= 2 to vanish; keep
  // only the qubit rows so that the reduced problem has an interior point.
  const double p_hi = experiment ? std::min(1.0, p + r.delta_p_star) : p;
  std::vector<int> support;
  if (p_hi == 0.0) {
    support = qubit;
  } else {
    for (int k = 0; k < kDim; ++k) support.push_back(k);
  }
  std::array<int, kDim> pos;
  pos.fill(-1);
  for (std::size_t s = 0; s < support.size(); ++s) pos[support[s]] = static_cast<int>(s);
  const int n = static_cast<int>(support.size());

  auto restrict = [&](const CMatrix& full) {
    CMatrix w(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) w(a, b) = full(support[a], support[b]);
    return w;
  };
  auto diagonal_sum = [&](sdp::VarId var, const std::vector<int>& indices) {
    CMatrix w = CMatrix::Zero(kDim, kDim);
    for (int k : indices) w(k, k) = 1.0;
    return sdp::LinearFunctional{{{var, restrict(w)}}, 0.0};
  };

  sdp::SdpProblem prob;
  const auto rho = prob.add_variable(n, "rho");
  prob.add_psd("rho >= 0", sdp::AffineHermitianExpr::variable(rho, n));
  if (n == kDim) prob.add_scalar("tr(rho) <= 1", diagonal_sum(rho, support), sdp::Sense::LessEqual, 1.0);

  const PptScope scope = r.mode == BoundMode::QubitSubspacePpt ? PptScope::QubitSubspace
                         : r.mode == BoundMode::FullPpt        ? PptScope::Full
                                                               : r.experiment_ppt;
  // Partial transpose on B: entry (ij, kl) = rho(il, kj).
  auto add_pt = [&](int levels, const std::string& label) {
    sdp::AffineHermitianExpr pt(levels * levels);
    for (int i = 0; i < levels; ++i)
      for (int j = 0; j < levels; ++j)
        for (int k = 0; k < levels; ++k)
          for (int l = 0; l < levels; ++l) {
            const int a = pos[idx(i, l)];
            const int b = pos[idx(k, j)];
            if (a >= 0 && b >= 0) pt.add_entry(i * levels + j, k * levels + l, rho, a, b);
          }
    prob.add_psd(label, std::move(pt));
  };
  if (scope == PptScope::QubitSubspace || n < kDim) {
    add_pt(2, "(Pi rho Pi)^T_B >= 0");
  } else {
    add_pt(3, "rho^T_B >= 0");
  }

  double tail = 0.0;
  if (experiment) {
    tail = kTsirelson * p_hi;
    if (n == kDim) {
      prob.add_scalar("sum p_qubit >= 1 - p* - dp*", diagonal_sum(rho, qubit), sdp::Sense::GreaterEqual, 1.0 - p_hi);
    } else {
      prob.add_scalar("sum p_qubit = 1", diagonal_sum(rho, qubit), sdp::Sense::Equal, 1.0);
    }
    if (r.marginals) {
      const auto& m = *r.marginals;
      for (int j = 0; j < 3; ++j) {
        check_probability(m.p_a[j], "marginal p_A");
        check_probability(m.p_b[j], "marginal p_B");
        if (!(m.delta_a[j] >= 0.0) || !(m.delta_b[j] >= 0.0)) {
          throw std::invalid_argument("marginal errors must be non-negative");
        }
        std::vector<int> row, col;
        for (int k = 0; k < 3; ++k) {
          if (pos[idx(j, k)] >= 0) row.push_back(idx(j, k));
          if (pos[idx(k, j)] >= 0) col.push_back(idx(k, j));
        }
        // Levels outside the support are already fixed at zero.
        if (row.empty()) continue;
        const std::string level = j < 2 ? std::to_string(j) : ">1";
        prob.add_scalar("p(n_A=" + level + ") bound", diagonal_sum(rho, row), sdp::Sense::LessEqual,
                        m.p_a[j] + m.delta_a[j]);
        prob.add_scalar("p(n_B=" + level + ") bound", diagonal_sum(rho, col), sdp::Sense::LessEqual,
                        m.p_b[j] + m.delta_b[j]);
      }
    }
  } else {
    tail = kTsirelson * p;
    prob.add_scalar("sum p_qubit = 1 - p*", diagonal_sum(rho, qubit), sdp::Sense::Equal, 1.0 - p);
  }

  prob.set_objective(sdp::Goal::Maximize, {{{rho, restrict(s_max_weight(eps11, eps12))}}, tail});
  if (tail_constant) *tail_constant = tail;
  if (support_out) *support_out = support;
  return prob;
}

SeparableBoundResult separable_bound(const BoundRequest& request) {
  SeparableBoundResult out;
  const auto angles = effective_angles(request);
  out.eps11 = angles[0];
  out.eps12 = angles[1];

  if (request.mode != BoundMode::Experiment && request.p_star == 1.0) {
    // Empty qubit block: every coherence in the objective touches it.
    out.tail_constant = kTsirelson;
    out.s_sep_max_raw = out.s_sep_max = out.dual_bound = kTsirelson;
    out.p_star = 1.0;
    out.optimizer = CMatrix::Zero(kDim, kDim);
    out.optimizer(idx(2, 2), idx(2, 2)) = 1.0;
    out.status = sdp::Status::Optimal;
    out.message = "qubit block empty; closed form";
    return out;
  }

  std::vector<int> support;
  const auto prob = build_bound_problem(request, &out.tail_constant, &support);
  out.p_star = std::max(0.0, request.p_star);
  out.p_star_clipped = request.p_star < 0.0;

  const auto sol = sdp::solve(prob, request.solver);
  out.status = sol.status;
  out.message = sol.message;
  out.s_sep_max_raw = sol.value;
  out.s_sep_max = std::min(sol.value, kTsirelson);
  out.dual_bound = sol.dual_bound;
  out.gap = sol.gap;
  out.iterations = sol.iterations;
  out.optimizer = CMatrix::Zero(kDim, kDim);
  if (!sol.variables.empty()) {
    const auto& v = sol.variables.front();
    for (std::size_t a = 0; a < support.size(); ++a)
      for (std::size_t b = 0; b < support.size(); ++b) out.optimizer(support[a], support[b]) = v(a, b);
  }

  for (std::size_t k = 0; k < prob.psd_constraints().size() && k < sol.psd_min_eigenvalues.size(); ++k) {
    const double e = sol.psd_min_eigenvalues[k];
    out.constraints.push_back({prob.psd_constraints()[k].label, e, 0.0, e < kActiveTol});
  }
  for (std::size_t k = 0; k < prob.scalar_constraints().size() && k < sol.scalar_slacks.size(); ++k) {
    const double s = sol.scalar_slacks[k];
    const bool eq = prob.scalar_constraints()[k].sense == sdp::Sense::Equal;
    out.constraints.push_back(
        {prob.scalar_constraints()[k].label, s, sol.scalar_multipliers[k], eq || std::abs(s) < kActiveTol});
  }
  if (!out.ok()) {
    warn(std::string("separable bound solve ended with status ") + sdp::to_string(out.status) + ": " + out.message);
  }
  return out;
}

CornerCheck angle_corner_check(const BoundRequest& request) {
  CornerCheck out;
  const double a = request.angle_error_bound;
  out.corners = {{{a, -a}, {a, a}, {-a, a}, {-a, -a}}};
  for (int k = 0; k < 4; ++k) {
    BoundRequest r = request;
    r.mode = BoundMode::Experiment;
    r.angle_errors = out.corners[k];
    out.values[k] = separable_bound(r).s_sep_max;
    if (out.values[k] > out.values[out.argmax]) out.argmax = k;
  }
  out.extremal = out.values[0] >= out.values[out.argmax] - 1e-7;
  return out;
}

WitnessVerdict verdict(double s_obs, double s_stderr, double bound_qubit_ppt, double bound_full_ppt) {
  if (!std::isfinite(s_obs) || !std::isfinite(s_stderr) || !std::isfinite(bound_qubit_ppt) ||
      !std::isfinite(bound_full_ppt)) {
    throw std::invalid_argument("verdict inputs must be finite");
  }
  if (s_obs > kTsirelson) {
    std::ostringstream os;
    os << "observed S = " << s_obs << " exceeds the maximum 2*sqrt(2) of the bounded objective";
    throw std::invalid_argument(os.str());
  }
  if (s_stderr < 0.0) throw std::invalid_argument("standard error must be non-negative");

  WitnessVerdict v;
  v.s_obs = s_obs;
  v.s_stderr = s_stderr;
  v.bound_qubit_ppt = bound_qubit_ppt;
  v.bound_full_ppt = bound_full_ppt;
  auto margin = [&](double bound) {
    const double diff = s_obs - bound;
    if (s_stderr > 0.0) return diff / s_stderr;
    if (diff == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
  };
  v.margin_qubit_sigma = margin(bound_qubit_ppt);
  v.margin_full_sigma = margin(bound_full_ppt);
  if (s_obs > bound_qubit_ppt) {
    v.conclusion = Conclusion::SinglePhotonEntangled;
  } else if (s_obs > bound_full_ppt) {
    v.conclusion = Conclusion::EntangledSubspaceUnknown;
  } else {
    v.conclusion = Conclusion::Inconclusive;
  }
  return v;
}

}  // namespace homowit
