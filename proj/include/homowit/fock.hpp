// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fock.hpp
 * @brief Truncated two-mode Fock-space states and channels.
 *
 * A bipartite state lives on {|0>,...,|dim_a-1>} x {|0>,...,|dim_b-1>}.
 * The product basis vector |ij> (i photons in mode A, j in mode B) maps to
 * row/column i*dim_b + j, so the matrix element <ij|rho|kl> = c_ijkl sits at
 * (i*dim_b + j, k*dim_b + l). The block structure used by the separable
 * bound (qubit block {0,1}x{0,1}, coherences, tail with n >= 2 somewhere)
 * is defined relative to this ordering.
 */

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace homowit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Party { A, B };

inline constexpr int kDefaultModeDim = 3;
inline constexpr int kMaxModeDim = 6;

/// Hermitian density matrix on a truncated two-mode Fock space.
///
/// Immutable after construction. Sub-normalized matrices are legal (they
/// arise as projections); positivity is only enforced on request via
/// is_physical().
class BipartiteFockState {
 public:
  /// Validates shape, hermiticity (1e-12) and trace <= 1 + 1e-12.
  /// Throws std::invalid_argument on violation.
  BipartiteFockState(int dim_a, int dim_b, CMatrix matrix);

  static BipartiteFockState from_pure(int dim_a, int dim_b, const CVector& amplitudes);
  static BipartiteFockState product(const CMatrix& rho_a, const CMatrix& rho_b);
  static BipartiteFockState fock(int dim_a, int dim_b, int n_a, int n_b);

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  int dim() const { return dim_a_ * dim_b_; }
  int index(int i, int j) const { return i * dim_b_ + j; }

  const CMatrix& matrix() const { return matrix_; }

  /// c_ijkl = <ij|rho|kl>.
  Complex element(int i, int j, int k, int l) const {
    return matrix_(index(i, j), index(k, l));
  }

  /// Joint photon-number probability p(n_A = i, n_B = j).
  double population(int i, int j) const { return matrix_(index(i, j), index(i, j)).real(); }

  double trace() const;
  double min_eigenvalue() const;

  /// PSD within eig_tol and trace <= 1 + 1e-12.
  bool is_physical(double eig_tol = 1e-9) const;

  CMatrix reduced(Party party) const;

  /// p(n = j) for the chosen mode, j = 0..dim-1.
  Eigen::VectorXd marginal(Party party) const;

  /// Population sitting on the highest Fock level of either mode.
  double cutoff_population() const;

  /// Mixture w*this + (1-w)*other; both states must share dimensions.
  BipartiteFockState mix(double w, const BipartiteFockState& other) const;

 private:
  int dim_a_;
  int dim_b_;
  CMatrix matrix_;
};

/// Block view of a state relative to the subspace with at most one photon
/// per mode.
struct BlockDecomposition {
  CMatrix qubit_block;      // 4x4, basis |00>,|01>,|10>,|11>
  CMatrix coherence_block;  // rows: qubit basis, cols: tail basis
  CMatrix tail_block;
  double tail_weight = 0.0;  // p(n_A >= 2 or n_B >= 2) = tr(rho) - tr(qubit_block)
};

/// cos(2 theta)|0>_A|1>_B + sin(2 theta)|1>_A|0>_B with theta in degrees.
/// Requires 0 <= theta <= 45.
BipartiteFockState make_tunable_state(double theta_deg, int dim = kDefaultModeDim);

/// Independent pure-loss (beam-splitter) channels on each mode with
/// transmissions eta_a, eta_b in [0, 1].
BipartiteFockState apply_loss(const BipartiteFockState& rho, double eta_a, double eta_b);

/// Kraus operators of the single-mode loss channel on dim levels.
std::vector<Eigen::MatrixXd> loss_kraus_operators(int dim, double eta);

/// Transposes the indices of one party. Exact involution.
CMatrix partial_transpose(const CMatrix& matrix, int dim_a, int dim_b, Party party);

/// Indices into the full matrix of the qubit-subspace basis |00>,|01>,|10>,|11>.
std::array<int, 4> qubit_subspace_indices(int dim_b);

/// Indices of the tail basis (n_A >= 2 or n_B >= 2), in Fock order.
std::vector<int> tail_subspace_indices(int dim_a, int dim_b);

CMatrix project_qubit_subspace(const BipartiteFockState& rho);
BlockDecomposition decompose_blocks(const BipartiteFockState& rho);

}  // namespace homowit
