// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/fock.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace homowit {
namespace {

BipartiteFockState bell_state() { return make_tunable_state(22.5); }

TEST(TunableState, SeparableAtZero) {
  const auto rho = make_tunable_state(0.0);
  EXPECT_NEAR(rho.population(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
}

TEST(TunableState, MaximallyEntangledAtQuarterPi) {
  const auto rho = bell_state();
  EXPECT_NEAR(rho.element(0, 1, 1, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho.population(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(rho.population(1, 0), 0.5, 1e-15);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0, 1e-12);  // rank one
  EXPECT_NEAR(es.eigenvalues().head(8).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(TunableState, FortyFive) {
  EXPECT_NEAR(make_tunable_state(45.0).population(1, 0), 1.0, 1e-15);
}

TEST(TunableState, RejectsOutOfRange) {
  EXPECT_THROW(make_tunable_state(-1.0), std::invalid_argument);
  EXPECT_THROW(make_tunable_state(45.5), std::invalid_argument);
}

TEST(Loss, IdentityAtUnitTransmission) {
  std::mt19937_64 rng(3);
  const auto rho = oracle::random_state(rng, 3, 3, 4);
  EXPECT_NEAR((apply_loss(rho, 1.0, 1.0).matrix() - rho.matrix()).norm(), 0.0, 1e-15);
}

TEST(Loss, SharedPhotonClosedForm) {
  const double eta = 0.7;
  const auto rho = bell_state();
  const auto out = apply_loss(rho, eta, eta);
  CMatrix expected = eta * rho.matrix();
  expected(0, 0) += 1.0 - eta;
  EXPECT_NEAR((out.matrix() - expected).norm(), 0.0, 1e-14);
}

TEST(Loss, SinglePhotonBinomial) {
  const auto out = apply_loss(BipartiteFockState::fock(3, 3, 1, 0), 0.85, 1.0);
  EXPECT_NEAR(out.population(1, 0), 0.85, 1e-15);
  EXPECT_NEAR(out.population(0, 0), 0.15, 1e-15);
}

TEST(Loss, TracePreservingAndPhysical) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto rho = oracle::random_state(rng, 3, 3, 1 + t % 9);
    const auto out = apply_loss(rho, 0.3 + 0.01 * t, 0.9 - 0.01 * t);
    EXPECT_NEAR(out.trace(), rho.trace(), 1e-12);
    EXPECT_TRUE(out.is_physical());
  }
}

TEST(Loss, RejectsBadTransmission) {
  EXPECT_THROW(apply_loss(bell_state(), 1.1, 1.0), std::invalid_argument);
  EXPECT_THROW(apply_loss(bell_state(), 0.5, -0.1), std::invalid_argument);
}

TEST(Loss, KrausCompletenessBelowCutoff) {
  for (double eta : {0.0, 0.2, 0.85, 1.0}) {
    const auto ks = loss_kraus_operators(4, eta);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& k : ks) sum += k.transpose() * k;
    EXPECT_NEAR((sum - Eigen::MatrixXd::Identity(4, 4)).norm(), 0.0, 1e-10) << eta;
  }
}

TEST(PartialTranspose, InvolutionExact) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto rho = oracle::random_state(rng, 3, 2 + t % 3, 3);
    for (Party party : {Party::A, Party::B}) {
      const CMatrix twice =
          partial_transpose(partial_transpose(rho.matrix(), rho.dim_a(), rho.dim_b(), party), rho.dim_a(),
                            rho.dim_b(), party);
      EXPECT_EQ(twice, rho.matrix());
    }
  }
}

TEST(PartialTranspose, BellStateNegativeEigenvalue) {
  const auto rho = bell_state();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(partial_transpose(rho.matrix(), 3, 3, Party::B));
  EXPECT_NEAR(es.eigenvalues().minCoeff(), -0.5, 1e-12);
}

TEST(PartialTranspose, ProductStaysPositive) {
  std::mt19937_64 rng(9);
  const CMatrix a = oracle::random_single_mode(rng, 3, 2);
  const CMatrix b = oracle::random_single_mode(rng, 3, 3);
  const auto rho = BipartiteFockState::product(a, b);
  const CMatrix pt = partial_transpose(rho.matrix(), 3, 3, Party::B);
  EXPECT_NEAR((pt - BipartiteFockState::product(a, b.transpose()).matrix()).norm(), 0.0, 1e-14);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pt);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(PartialTranspose, DiagonalUnchanged) {
  CMatrix d = CMatrix::Zero(9, 9);
  for (int i = 0; i < 9; ++i) d(i, i) = 0.1 * (i + 1);
  EXPECT_EQ(partial_transpose(d, 3, 3, Party::A), d);
}

TEST(Blocks, BellStateHasNoTail) {
  const auto blocks = decompose_blocks(bell_state());
  EXPECT_NEAR(blocks.tail_weight, 0.0, 1e-15);
  EXPECT_NEAR(blocks.qubit_block(1, 2).real(), 0.5, 1e-15);
}

TEST(Blocks, TwoPhotonsAllTail) {
  const auto blocks = decompose_blocks(BipartiteFockState::fock(3, 3, 2, 0));
  EXPECT_NEAR(blocks.qubit_block.norm(), 0.0, 1e-15);
  EXPECT_NEAR(blocks.tail_weight, 1.0, 1e-15);
}

TEST(Blocks, MixtureTailWeight) {
  const auto rho = bell_state().mix(0.9, BipartiteFockState::fock(3, 3, 2, 0));
  const auto blocks = decompose_blocks(rho);
  EXPECT_NEAR(blocks.tail_weight, 0.1, 1e-14);
  EXPECT_NEAR(blocks.tail_weight, rho.trace() - blocks.qubit_block.trace().real(), 1e-15);
}

TEST(Blocks, TailWeightNonNegative) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto rho = oracle::random_state(rng, 3, 3, 1 + t % 9);
    const auto blocks = decompose_blocks(rho);
    EXPECT_GE(blocks.tail_weight, -1e-12);
    EXPECT_NEAR(blocks.tail_weight, rho.trace() - blocks.qubit_block.trace().real(), 1e-12);
  }
}

TEST(State, HermitianAndTraceChecks) {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(0, 1) = 0.1;
  EXPECT_THROW(BipartiteFockState(2, 2, m), std::invalid_argument);
  CMatrix big = CMatrix::Identity(4, 4) * 0.5;
  EXPECT_THROW(BipartiteFockState(2, 2, big), std::invalid_argument);
}

TEST(State, OrderingIsRowMajor) {
  const auto rho = BipartiteFockState::fock(3, 4, 2, 1);
  EXPECT_NEAR(rho.matrix()(2 * 4 + 1, 2 * 4 + 1).real(), 1.0, 0.0);
}

}  // namespace
}  // namespace homowit
