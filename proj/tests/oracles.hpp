// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

// Reference computations for the test suites. Nothing here calls into the
// library's numerics: Hermite functions come from Boost, integrals from
// Gauss-Kronrod quadrature, and the bound oracles draw explicit states.

#pragma once

#include "homowit/fock.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <random>

namespace oracle {

using homowit::BipartiteFockState;
using homowit::CMatrix;
using homowit::Complex;

/// phi_n(x) from Boost's physicists' Hermite polynomials.
double phi(int n, double x);

double integrate_line(const std::function<double(double)>& f);
double integrate_half_line(const std::function<double(double)>& f);

/// Brute-force p(a, b) at relative phase delta_phi: the joint quadrature
/// density is integrated over each quadrant by nested quadrature and
/// averaged over `phases` equally spaced common phases.
std::array<std::array<double, 2>, 2> quadrant_probabilities(const BipartiteFockState& rho, double delta_phi,
                                                            int phases = 64);

/// Joint density evaluated term by term.
double joint_density(const BipartiteFockState& rho, double phi_a, double phi_b, double x_a, double x_b);

/// Random density matrix of the given rank (Ginibre construction).
BipartiteFockState random_state(std::mt19937_64& rng, int dim_a, int dim_b, int rank);
CMatrix random_single_mode(std::mt19937_64& rng, int dim, int rank);

/// Mixture of `terms` random product states.
BipartiteFockState random_separable(std::mt19937_64& rng, int dim, int terms);

/// The separable objective on a 3x3 state at zero angle error, written out
/// term by term, without the tail constant.
double coherence_objective(const CMatrix& rho9);

/// Best value of the bound objective (tail constant included) over `draws`
/// random product states on 3x3, mixed pairwise to reach tail weight p
/// exactly. Every candidate is an explicit separable state.
double best_separable_draw(double p, int draws, std::uint64_t seed);

/// Same, for states whose {0,1}x{0,1} projection is a mixture of product
/// states while tail block and coherences are arbitrary. For each draw of
/// the projection Q and tail block T the best compatible coherence block is
/// taken in closed form.
double best_qubit_separable_draw(double p, int draws, std::uint64_t seed);

}  // namespace oracle
