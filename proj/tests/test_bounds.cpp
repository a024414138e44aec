// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/bounds.hpp"
#include "homowit/homodyne.hpp"
#include "homowit/tomo.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace homowit {
namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kPi = std::numbers::pi;

BoundRequest request(double p, BoundMode mode = BoundMode::QubitSubspacePpt) {
  BoundRequest r;
  r.p_star = p;
  r.mode = mode;
  return r;
}

LocalMarginals marginals_of(const BipartiteFockState& rho, double delta) {
  LocalMarginals m;
  const Eigen::VectorXd a = rho.marginal(Party::A), b = rho.marginal(Party::B);
  m.p_a = {a(0), a(1), std::max(0.0, 1.0 - a(0) - a(1))};
  m.p_b = {b(0), b(1), std::max(0.0, 1.0 - b(0) - b(1))};
  m.delta_a = {delta, delta, delta};
  m.delta_b = {delta, delta, delta};
  return m;
}

TEST(AngleCoefficients, ZeroError) {
  const auto c = angle_error_coefficients(0.0, 0.0);
  EXPECT_NEAR(c.c, 2.0 * kSqrt2, 1e-15);
  EXPECT_NEAR(c.d, 0.0, 1e-15);
}

TEST(AngleCoefficients, ClosedForm) {
  const double e11 = 0.013, e12 = -0.021;
  const auto c = angle_error_coefficients(e11, e12);
  EXPECT_NEAR(c.c, 2.0 * (std::cos(e11 - kPi / 4) + std::cos(e12 + kPi / 4)), 1e-15);
  EXPECT_NEAR(c.d, 2.0 * (std::sin(e11 - kPi / 4) + std::sin(e12 + kPi / 4)), 1e-15);
}

TEST(SMax, BellState) {
  EXPECT_NEAR(s_max_objective(make_tunable_state(22.5).matrix(), 0.0), 4.0 * kSqrt2 / kPi, 1e-14);
}

TEST(SMax, TailOnly) {
  EXPECT_NEAR(s_max_objective(BipartiteFockState::fock(3, 3, 2, 2).matrix(), 1.0), 2.0 * kSqrt2, 1e-15);
}

TEST(SMax, MatchesTermByTermObjective) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto rho = oracle::random_state(rng, 3, 3, 1 + t % 9);
    const double tail = decompose_blocks(rho).tail_weight;
    EXPECT_NEAR(s_max_objective(rho.matrix(), tail),
                oracle::coherence_objective(rho.matrix()) + 2.0 * kSqrt2 * tail, 1e-13);
  }
}

TEST(SMax, AngleErrorUsesComplexCoefficient) {
  std::mt19937_64 rng(4);
  const auto rho = oracle::random_state(rng, 3, 3, 3);
  const double e11 = 0.017, e12 = -0.017;
  const auto cd = angle_error_coefficients(e11, e12);
  const Complex k(cd.c, cd.d);
  const CMatrix& m = rho.matrix();
  const double expected = 4.0 / kPi * (m(3, 1) * k).real() +
                          4.0 / (kSqrt2 * kPi) * ((m(6, 4) + m(4, 2)) * k).real();
  EXPECT_NEAR(s_max_objective(m, 0.0, e11, e12), expected, 1e-14);
}

TEST(SMax, BoundsAnalyticChshOnPhysicalStates) {
  // The tail constant dominates every tail term.
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto rho = oracle::random_state(rng, 3, 3, 1 + t % 9);
    const double tail = decompose_blocks(rho).tail_weight;
    EXPECT_LE(analytic_chsh(rho), s_max_objective(rho.matrix(), tail) + 1e-12);
  }
}

TEST(SeparableBound, QubitEndpoint) {
  const auto r = separable_bound(request(0.0));
  ASSERT_TRUE(r.ok()) << r.message;
  EXPECT_NEAR(r.s_sep_max, 2.0 * kSqrt2 / kPi, 1e-4);
}

TEST(SeparableBound, TailEndpoint) {
  for (BoundMode mode : {BoundMode::QubitSubspacePpt, BoundMode::FullPpt}) {
    const auto r = separable_bound(request(1.0, mode));
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.s_sep_max, 2.0 * kSqrt2, 1e-6);
  }
}

TEST(SeparableBound, RangeAndOrdering) {
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    const auto q = separable_bound(request(p));
    const auto f = separable_bound(request(p, BoundMode::FullPpt));
    ASSERT_TRUE(q.ok() && f.ok()) << p;
    EXPECT_GE(q.s_sep_max, 0.0);
    EXPECT_LE(q.s_sep_max, 2.0 * kSqrt2 + 1e-6);
    EXPECT_LE(f.s_sep_max, q.s_sep_max + 1e-7) << p;
    EXPECT_LE(q.s_sep_max, q.s_sep_max_raw + 1e-12);
  }
}

TEST(SeparableBound, OptimizerFeasible) {
  const auto r = separable_bound(request(0.2, BoundMode::FullPpt));
  ASSERT_TRUE(r.ok());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r.optimizer);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-7);
  EXPECT_LE(r.optimizer.trace().real(), 1.0 + 1e-7);
  EXPECT_NEAR(s_max_objective(r.optimizer, 0.2), r.s_sep_max_raw, 1e-6);
}

TEST(SeparableBound, ReportsConstraintActivity) {
  const auto r = separable_bound(request(0.1));
  ASSERT_FALSE(r.constraints.empty());
  bool saw_ppt = false;
  for (const auto& c : r.constraints) saw_ppt |= c.label.find("T_B") != std::string::npos;
  EXPECT_TRUE(saw_ppt);
}

TEST(SeparableBound, RequestValidation) {
  EXPECT_THROW(separable_bound(request(1.2)), std::invalid_argument);
  EXPECT_THROW(separable_bound(request(std::nan(""))), std::invalid_argument);
  const auto r = separable_bound(request(-1e-4));
  EXPECT_TRUE(r.p_star_clipped);
  EXPECT_EQ(r.p_star, 0.0);
}

TEST(SeparableBound, ProductStatesNeverExceedIt) {
  // Exact p* of each separable state; the bound is read on a grid and
  // rounded up in p*, which is safe because the curve is non-decreasing.
  constexpr int kGrid = 200;
  std::vector<double> full(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    const auto r = separable_bound(request(static_cast<double>(i) / kGrid, BoundMode::FullPpt));
    ASSERT_TRUE(r.ok());
    full[i] = r.s_sep_max;
    if (i > 0) {
      ASSERT_GE(full[i], full[i - 1] - 1e-9);
    }
  }
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10000; ++t) {
    const auto sigma = oracle::random_separable(rng, 3, 1 + t % 4);
    const Eigen::VectorXd a = sigma.marginal(Party::A), b = sigma.marginal(Party::B);
    const double ps = std::max(0.0, 2.0 - a(0) - a(1) - b(0) - b(1));
    const auto idx = static_cast<std::size_t>(std::min<double>(kGrid, std::ceil(ps * kGrid - 1e-12)));
    EXPECT_LE(analytic_chsh(sigma), full[idx] + 1e-6) << t;
  }
}

TEST(SeparableBound, ProductStatesExactSolves) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 100; ++t) {
    const auto sigma = oracle::random_separable(rng, 3, 1 + t % 4);
    const Eigen::VectorXd a = sigma.marginal(Party::A), b = sigma.marginal(Party::B);
    const auto r = separable_bound(request(std::clamp(2.0 - a(0) - a(1) - b(0) - b(1), 0.0, 1.0), BoundMode::FullPpt));
    ASSERT_TRUE(r.ok());
    EXPECT_LE(analytic_chsh(sigma), r.s_sep_max + 1e-6);
  }
}

TEST(SeparableBound, OracleSandwich) {
  for (double p : {0.05}) {
    const auto q = separable_bound(request(p));
    const auto f = separable_bound(request(p, BoundMode::FullPpt));
    const double best_q = oracle::best_qubit_separable_draw(p, 100000, 1);
    const double best_f = oracle::best_separable_draw(p, 100000, 1);
    EXPECT_GE(q.s_sep_max, best_q - 1e-6);
    EXPECT_GE(f.s_sep_max, best_f - 1e-6);
    EXPECT_LE(q.s_sep_max - best_q, 0.05);
    EXPECT_LE(f.s_sep_max - best_f, 0.05);
  }
}

TEST(SeparableBound, WitnessDetectsBellState) {
  const double s = analytic_chsh(make_tunable_state(22.5));
  const auto r = separable_bound(request(0.0));
  EXPECT_NEAR(s - r.s_sep_max, 0.9003, 1e-3);
  EXPECT_EQ(verdict(s, 0.0, r.s_sep_max, r.s_sep_max).conclusion, Conclusion::SinglePhotonEntangled);
}

TEST(Experiment, AngleErrorsOnlyRaiseTheBound) {
  const auto rho = apply_loss(make_tunable_state(10.0), 0.74, 0.74);
  BoundRequest r = request(0.0, BoundMode::Experiment);
  r.delta_p_star = 0.002;
  r.marginals = marginals_of(rho, 0.002);
  const auto with_errors = separable_bound(r);
  r.angle_errors = std::array<double, 2>{0.0, 0.0};
  const auto without = separable_bound(r);
  ASSERT_TRUE(with_errors.ok() && without.ok());
  EXPECT_GE(with_errors.s_sep_max, without.s_sep_max - 1e-7);
  EXPECT_NEAR(with_errors.eps11, kPi / 180, 1e-15);
  EXPECT_NEAR(with_errors.eps12, -kPi / 180, 1e-15);
}

TEST(Experiment, MarginalsTightenTheBound) {
  const auto rho = apply_loss(make_tunable_state(5.0), 0.74, 0.74);
  BoundRequest r = request(0.01, BoundMode::Experiment);
  r.angle_errors = std::array<double, 2>{0.0, 0.0};
  const auto loose = separable_bound(r);
  r.marginals = marginals_of(rho, 0.002);
  const auto tight = separable_bound(r);
  ASSERT_TRUE(loose.ok() && tight.ok());
  EXPECT_LT(tight.s_sep_max, loose.s_sep_max);
  EXPECT_NEAR(loose.s_sep_max, separable_bound(request(0.01)).s_sep_max, 1e-6);
  // The true state is compatible with its own marginals, and separable
  // states below the bound stay below it.
  EXPECT_GT(analytic_chsh(rho), tight.s_sep_max);
}

TEST(Experiment, FullScopeIsTighter) {
  const auto rho = apply_loss(make_tunable_state(15.0), 0.74, 0.74);
  BoundRequest r = request(0.0, BoundMode::Experiment);
  r.delta_p_star = 0.003;
  r.marginals = marginals_of(rho, 0.003);
  const auto q = separable_bound(r);
  r.experiment_ppt = PptScope::Full;
  const auto f = separable_bound(r);
  ASSERT_TRUE(q.ok() && f.ok());
  EXPECT_LE(f.s_sep_max, q.s_sep_max + 1e-7);
}

TEST(Experiment, ZeroTailWeightSolvesOnQubitRows) {
  const auto rho = apply_loss(make_tunable_state(15.0), 0.74, 0.74);
  BoundRequest r = request(0.0, BoundMode::Experiment);
  r.marginals = marginals_of(rho, 0.003);
  for (PptScope scope : {PptScope::QubitSubspace, PptScope::Full}) {
    r.experiment_ppt = scope;
    const auto res = separable_bound(r);
    ASSERT_TRUE(res.ok()) << res.message;
    EXPECT_EQ(res.tail_constant, 0.0);
  }
}

TEST(Experiment, InfeasibleMarginalsReported) {
  BoundRequest r = request(0.0, BoundMode::Experiment);
  LocalMarginals m;
  m.p_a = {0.1, 0.1, 0.0};
  m.p_b = {0.1, 0.1, 0.0};
  r.marginals = m;
  const auto res = separable_bound(r);
  EXPECT_FALSE(res.ok());
  EXPECT_EQ(res.status, sdp::Status::Infeasible);
}

TEST(Experiment, CornerIsExtremal) {
  const auto rho = apply_loss(make_tunable_state(22.5), 0.74, 0.74);
  BoundRequest r = request(0.001, BoundMode::Experiment);
  r.delta_p_star = 0.002;
  r.marginals = marginals_of(rho, 0.002);
  const auto check = angle_corner_check(r);
  ASSERT_EQ(check.values.size(), 4u);
  EXPECT_TRUE(check.extremal);
}

TEST(Verdict, Rules) {
  EXPECT_EQ(verdict(1.33, 0.006, 0.95, 0.93).conclusion, Conclusion::SinglePhotonEntangled);
  EXPECT_EQ(verdict(0.0, 0.01, 0.9, 0.85).conclusion, Conclusion::Inconclusive);
  EXPECT_EQ(verdict(0.88, 0.01, 0.9, 0.85).conclusion, Conclusion::EntangledSubspaceUnknown);
  EXPECT_EQ(verdict(0.9, 0.01, 0.9, 0.85).conclusion, Conclusion::EntangledSubspaceUnknown);
  EXPECT_EQ(verdict(0.85, 0.01, 0.9, 0.85).conclusion, Conclusion::Inconclusive);
  EXPECT_THROW(verdict(2.9, 0.01, 0.9, 0.85), std::invalid_argument);
  EXPECT_THROW(verdict(std::nan(""), 0.01, 0.9, 0.85), std::invalid_argument);
}

TEST(Verdict, Margins) {
  const auto v = verdict(1.0, 0.05, 0.9, 0.8);
  EXPECT_NEAR(v.margin_qubit_sigma, 2.0, 1e-12);
  EXPECT_NEAR(v.margin_full_sigma, 4.0, 1e-12);
  EXPECT_TRUE(std::isinf(verdict(1.0, 0.0, 0.9, 0.8).margin_qubit_sigma));
}

TEST(BoundMode, Parse) {
  EXPECT_EQ(parse_bound_mode("qubit-subspace-ppt"), BoundMode::QubitSubspacePpt);
  EXPECT_EQ(parse_bound_mode("full-ppt"), BoundMode::FullPpt);
  EXPECT_EQ(parse_bound_mode("experiment"), BoundMode::Experiment);
  EXPECT_THROW(parse_bound_mode("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace homowit
