// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file sdp.hpp
 * @brief Small dense semidefinite programs over Hermitian matrix variables.
 *
 * A problem is stated in modeling form: Hermitian matrix variables, a real
 * linear objective sum_v tr(W_v X_v), affine Hermitian expressions that must
 * be positive semidefinite, and scalar (in)equalities of the same linear
 * form as the objective. Variables are free; positivity of a variable is
 * just another PSD constraint.
 *
 * Solution strategy: each variable is expanded into its n^2 real
 * parameters, equality constraints are eliminated through a null-space
 * basis, and the resulting linear matrix inequality problem
 *
 *     maximize b'y   s.t.  Z = C - sum_i y_i A_i  >= 0   (block diagonal)
 *
 * is solved together with its dual  minimize <C,X> s.t. <A_i,X> = b_i,
 * X >= 0  by an infeasible-start primal-dual interior-point method (HKM
 * search direction, Mehrotra predictor-corrector). Hermitian blocks enter
 * through the real symmetric embedding [[Re, -Im], [Im, Re]]. The dual
 * objective <C,X> is a certified bound on the optimum once X is feasible.
 */

#pragma once

#include "homowit/fock.hpp"

#include <span>
#include <string>
#include <vector>

namespace homowit::sdp {

struct VarId {
  int index = -1;
};

/// out(row, col) += coeff * X_var(var_row, var_col).
struct EntryMap {
  int row = 0;
  int col = 0;
  VarId var;
  int var_row = 0;
  int var_col = 0;
  Complex coeff{1.0, 0.0};
};

class AffineHermitianExpr {
 public:
  AffineHermitianExpr() = default;
  explicit AffineHermitianExpr(int dim);

  static AffineHermitianExpr variable(VarId var, int dim);

  int dim() const { return dim_; }
  const CMatrix& constant() const { return constant_; }
  const std::vector<EntryMap>& entries() const { return entries_; }

  AffineHermitianExpr& add_constant(const CMatrix& c);
  AffineHermitianExpr& add_entry(int row, int col, VarId var, int var_row, int var_col, Complex coeff = 1.0);
  /// out(r, c) += X_var(indices[r], indices[c]).
  AffineHermitianExpr& add_submatrix(VarId var, std::span<const int> indices);

 private:
  int dim_ = 0;
  CMatrix constant_;
  std::vector<EntryMap> entries_;
};

/// sum_v Re tr(W_v X_v) + constant. Each W_v must be Hermitian.
struct LinearFunctional {
  std::vector<std::pair<VarId, CMatrix>> terms;
  double constant = 0.0;
};

enum class Sense { Equal, LessEqual, GreaterEqual };
enum class Goal { Maximize, Minimize };

struct ScalarConstraint {
  std::string label;
  LinearFunctional lhs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct PsdConstraint {
  std::string label;
  AffineHermitianExpr expr;
};

struct Variable {
  std::string name;
  int dim = 0;
};

class SdpProblem {
 public:
  VarId add_variable(int dim, std::string name = {});
  void set_objective(Goal goal, LinearFunctional objective);
  void add_psd(std::string label, AffineHermitianExpr expr);
  void add_scalar(std::string label, LinearFunctional lhs, Sense sense, double rhs);

  const std::vector<Variable>& variables() const { return variables_; }
  Goal goal() const { return goal_; }
  const LinearFunctional& objective() const { return objective_; }
  const std::vector<PsdConstraint>& psd_constraints() const { return psd_; }
  const std::vector<ScalarConstraint>& scalar_constraints() const { return scalars_; }

  /// Throws std::invalid_argument on inconsistent dimensions, unknown
  /// variables or non-Hermitian data.
  void validate() const;

 private:
  std::vector<Variable> variables_;
  Goal goal_ = Goal::Maximize;
  LinearFunctional objective_;
  std::vector<PsdConstraint> psd_;
  std::vector<ScalarConstraint> scalars_;
};

enum class Status { Optimal, Infeasible, Unbounded, MaxIterations, NumericalError };

const char* to_string(Status status);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;   // modeling objective at the current point
  double dual_bound = 0.0;  // bound from the dual multipliers
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double mu = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct SdpSolution {
  Status status = Status::NumericalError;
  std::string message;
  /// Objective at the returned point (feasible when status is Optimal).
  double value = 0.0;
  /// Dual bound: >= optimum for Maximize, <= optimum for Minimize.
  double dual_bound = 0.0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  std::vector<CMatrix> variables;
  std::vector<double> psd_min_eigenvalues;
  /// Constraint slack (>= 0 when satisfied); equalities report -|residual|.
  std::vector<double> scalar_slacks;
  /// Multipliers of the scalar inequalities (0 for equalities).
  std::vector<double> scalar_multipliers;
  int iterations = 0;
  std::vector<IterationRecord> history;

  bool optimal() const { return status == Status::Optimal; }
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

/// [[Re H, -Im H], [Im H, Re H]]; PSD iff H is PSD.
Eigen::MatrixXd embed(const CMatrix& h);
/// Inverse of embed on matrices with the embedded block structure; general
/// symmetric input is first projected onto that structure.
CMatrix unembed(const Eigen::MatrixXd& s);

}  // namespace homowit::sdp
