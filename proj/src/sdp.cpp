// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace homowit::sdp {

AffineHermitianExpr::AffineHermitianExpr(int dim) : dim_(dim), constant_(CMatrix::Zero(dim, dim)) {
  if (dim < 1) throw std::invalid_argument("expression dimension must be positive");
}

AffineHermitianExpr AffineHermitianExpr::variable(VarId var, int dim) {
  AffineHermitianExpr e(dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) e.add_entry(r, c, var, r, c);
  return e;
}

AffineHermitianExpr& AffineHermitianExpr::add_constant(const CMatrix& c) {
  if (c.rows() != dim_ || c.cols() != dim_) throw std::invalid_argument("constant has wrong shape");
  constant_ += c;
  return *this;
}

AffineHermitianExpr& AffineHermitianExpr::add_entry(int row, int col, VarId var, int var_row, int var_col,
                                                    Complex coeff) {
  if (row < 0 || col < 0 || row >= dim_ || col >= dim_) throw std::out_of_range("entry outside expression");
  entries_.push_back({row, col, var, var_row, var_col, coeff});
  return *this;
}

AffineHermitianExpr& AffineHermitianExpr::add_submatrix(VarId var, std::span<const int> indices) {
  if (static_cast<int>(indices.size()) != dim_) throw std::invalid_argument("index list must match dimension");
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) add_entry(r, c, var, indices[r], indices[c]);
  return *this;
}

VarId SdpProblem::add_variable(int dim, std::string name) {
  if (dim < 1) throw std::invalid_argument("variable dimension must be positive");
  variables_.push_back({std::move(name), dim});
  return VarId{static_cast<int>(variables_.size()) - 1};
}

void SdpProblem::set_objective(Goal goal, LinearFunctional objective) {
  goal_ = goal;
  objective_ = std::move(objective);
}

void SdpProblem::add_psd(std::string label, AffineHermitianExpr expr) {
  psd_.push_back({std::move(label), std::move(expr)});
}

void SdpProblem::add_scalar(std::string label, LinearFunctional lhs, Sense sense, double rhs) {
  scalars_.push_back({std::move(label), std::move(lhs), sense, rhs});
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::MaxIterations: return "max-iterations";
    case Status::NumericalError: return "numerical-error";
  }
  return "unknown";
}

Eigen::MatrixXd embed(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = h.real();
  s.bottomRightCorner(n, n) = h.real();
  s.topRightCorner(n, n) = -h.imag();
  s.bottomLeftCorner(n, n) = h.imag();
  return s;
}

CMatrix unembed(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) throw std::invalid_argument("embedding must be square, even size");
  const Eigen::Index n = s.rows() / 2;
  const Eigen::MatrixXd re = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  const Eigen::MatrixXd im = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  CMatrix h(n, n);
  h.real() = re;
  h.imag() = im;
  return h;
}

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kAcceptTol = 1e-7;
constexpr int kStallWindow = 8;

bool is_hermitian(const CMatrix& m) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= kHermitianTol * (1.0 + m.cwiseAbs().maxCoeff());
}

// Real parametrization of all Hermitian variables: one parameter per
// diagonal entry and two (real, imaginary) per upper off-diagonal entry.
class Parametrization {
 public:
  explicit Parametrization(const std::vector<Variable>& vars) {
    for (const auto& v : vars) {
      offset_.push_back(count_);
      dims_.push_back(v.dim);
      count_ += v.dim * v.dim;
    }
  }

  int count() const { return count_; }

  // Local layout: row-major over (r, c) with r <= c; diagonal -> 1 slot,
  // off-diagonal -> 2 consecutive slots (re, im).
  int re_index(int var, int r, int c) const { return offset_[var] + local(var, r, c); }
  int im_index(int var, int r, int c) const { return offset_[var] + local(var, r, c) + 1; }

  // Coefficients c_k such that X_var(r, c) = sum_k c_k theta_k.
  template <class F>
  void for_entry(int var, int r, int c, F&& f) const {
    if (r == c) {
      f(re_index(var, r, r), Complex(1.0, 0.0));
    } else if (r < c) {
      f(re_index(var, r, c), Complex(1.0, 0.0));
      f(im_index(var, r, c), Complex(0.0, 1.0));
    } else {
      f(re_index(var, c, r), Complex(1.0, 0.0));
      f(im_index(var, c, r), Complex(0.0, -1.0));
    }
  }

  // Coefficients of Re tr(W X_var) in theta.
  void add_functional(int var, const CMatrix& w, Eigen::VectorXd& g) const {
    const int n = dims_[var];
    for (int r = 0; r < n; ++r) {
      g(re_index(var, r, r)) += w(r, r).real();
      for (int c = r + 1; c < n; ++c) {
        g(re_index(var, r, c)) += 2.0 * w(r, c).real();
        g(im_index(var, r, c)) += 2.0 * w(r, c).imag();
      }
    }
  }

  CMatrix value(int var, const Eigen::VectorXd& theta) const {
    const int n = dims_[var];
    CMatrix x(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        Complex s = 0.0;
        for_entry(var, r, c, [&](int k, Complex coeff) { s += coeff * theta(k); });
        x(r, c) = s;
      }
    return x;
  }

 private:
  int local(int var, int r, int c) const {
    const int n = dims_[var];
    int idx = 0;
    for (int rr = 0; rr < r; ++rr) idx += 1 + 2 * (n - rr - 1);
    return c == r ? idx : idx + 1 + 2 * (c - r - 1);
  }

  std::vector<int> offset_;
  std::vector<int> dims_;
  int count_ = 0;
};

struct CompiledPsd {
  CMatrix constant;
  std::vector<std::pair<int, CMatrix>> linear;  // (parameter, image of its basis matrix)
};

struct CompiledScalar {
  Eigen::VectorXd w;
  double offset = 0.0;  // lhs = w'theta + offset
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

CompiledPsd compile_psd(const AffineHermitianExpr& e, const Parametrization& par) {
  CompiledPsd out;
  out.constant = e.constant();
  std::vector<int> slot(par.count(), -1);
  for (const auto& m : e.entries()) {
    par.for_entry(m.var.index, m.var_row, m.var_col, [&](int k, Complex coeff) {
      if (slot[k] < 0) {
        slot[k] = static_cast<int>(out.linear.size());
        out.linear.emplace_back(k, CMatrix::Zero(e.dim(), e.dim()));
      }
      out.linear[slot[k]].second(m.row, m.col) += m.coeff * coeff;
    });
  }
  return out;
}

CompiledScalar compile_functional(const LinearFunctional& f, const Parametrization& par) {
  CompiledScalar out;
  out.w = Eigen::VectorXd::Zero(par.count());
  for (const auto& [var, w] : f.terms) par.add_functional(var.index, w, out.w);
  out.offset = f.constant;
  return out;
}

// One block of the reduced LMI: Z = C - sum_i y_i A_i, with the A_i stored
// column-wise as vec(A_i).
struct Block {
  int n = 0;
  Eigen::MatrixXd c;
  Eigen::MatrixXd a;  // (n*n) x m
};

Eigen::MatrixXd apply_adjoint(const Block& b, const Eigen::VectorXd& y) {
  Eigen::VectorXd v = b.a * y;
  return Eigen::Map<Eigen::MatrixXd>(v.data(), b.n, b.n);
}

Eigen::VectorXd apply_op(const std::vector<Block>& blocks, const std::vector<Eigen::MatrixXd>& w, int m) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    out.noalias() += blocks[j].a.transpose() * Eigen::Map<const Eigen::VectorXd>(w[j].data(), w[j].size());
  }
  return out;
}

double inner(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j].cwiseProduct(b[j]).sum();
  return s;
}

double frob(const std::vector<Eigen::MatrixXd>& a) { return std::sqrt(inner(a, a)); }

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with X + alpha dX >= 0 (infinity if unrestricted).
double max_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd half = llt.matrixL().solve(dx);
  const Eigen::MatrixXd w = llt.matrixL().solve(half.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(w), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step(const std::vector<Eigen::MatrixXd>& x, const std::vector<Eigen::MatrixXd>& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) a = std::min(a, max_step(x[j], dx[j]));
  return a;
}

struct Reduced {
  std::vector<Block> blocks;
  Eigen::VectorXd b;
  double objective_offset = 0.0;  // model objective (maximize form) = b'y + offset
  Eigen::VectorXd theta0;
  Eigen::MatrixXd null_basis;
  int m = 0;
  std::vector<int> scalar_block;  // block index per scalar constraint (-1 for equality)
};

}  // namespace

void SdpProblem::validate() const {
  const int nv = static_cast<int>(variables_.size());
  auto check_var = [&](VarId v) {
    if (v.index < 0 || v.index >= nv) throw std::invalid_argument("reference to unknown variable");
  };
  auto check_functional = [&](const LinearFunctional& f, const std::string& what) {
    for (const auto& [v, w] : f.terms) {
      check_var(v);
      const int d = variables_[v.index].dim;
      if (w.rows() != d || w.cols() != d) throw std::invalid_argument(what + ": weight has wrong shape");
      if (!is_hermitian(w)) throw std::invalid_argument(what + ": weight is not Hermitian");
    }
  };
  check_functional(objective_, "objective");
  for (const auto& s : scalars_) check_functional(s.lhs, "constraint '" + s.label + "'");
  if (variables_.empty()) throw std::invalid_argument("problem has no variables");

  const Parametrization par(variables_);
  for (const auto& p : psd_) {
    for (const auto& e : p.expr.entries()) {
      check_var(e.var);
      const int d = variables_[e.var.index].dim;
      if (e.var_row < 0 || e.var_col < 0 || e.var_row >= d || e.var_col >= d) {
        throw std::invalid_argument("PSD constraint '" + p.label + "' references entry outside variable");
      }
    }
    const auto compiled = compile_psd(p.expr, par);
    bool ok = is_hermitian(compiled.constant);
    for (const auto& [k, h] : compiled.linear) ok = ok && is_hermitian(h);
    if (!ok) throw std::invalid_argument("PSD constraint '" + p.label + "' is not Hermitian-valued");
  }
}

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();
  const Parametrization par(problem.variables());
  const int np = par.count();
  const double goal_sign = problem.goal() == Goal::Maximize ? 1.0 : -1.0;

  SdpSolution sol;

  // Objective and scalar constraints in parameter space.
  const auto obj = compile_functional(problem.objective(), par);
  std::vector<CompiledScalar> scalars;
  std::vector<int> equality_rows;
  for (std::size_t s = 0; s < problem.scalar_constraints().size(); ++s) {
    const auto& sc = problem.scalar_constraints()[s];
    auto c = compile_functional(sc.lhs, par);
    c.sense = sc.sense;
    c.rhs = sc.rhs;
    if (sc.sense == Sense::Equal) equality_rows.push_back(static_cast<int>(s));
    scalars.push_back(std::move(c));
  }

  // Eliminate equalities: theta = theta0 + N y.
  Reduced red;
  if (equality_rows.empty()) {
    red.theta0 = Eigen::VectorXd::Zero(np);
    red.null_basis = Eigen::MatrixXd::Identity(np, np);
  } else {
    const int ne = static_cast<int>(equality_rows.size());
    Eigen::MatrixXd e(ne, np);
    Eigen::VectorXd f(ne);
    for (int r = 0; r < ne; ++r) {
      e.row(r) = scalars[equality_rows[r]].w.transpose();
      f(r) = scalars[equality_rows[r]].rhs - scalars[equality_rows[r]].offset;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff) ++rank;
    svd.setThreshold(cutoff / std::max(1.0, sv.size() > 0 ? sv(0) : 1.0));
    red.theta0 = svd.solve(f);
    const double resid = (e * red.theta0 - f).norm();
    if (resid > 1e-9 * (1.0 + f.norm())) {
      sol.status = Status::Infeasible;
      sol.message = "equality constraints are inconsistent";
      return sol;
    }
    red.null_basis = svd.matrixV().rightCols(np - rank);
  }
  red.m = static_cast<int>(red.null_basis.cols());
  const int m = red.m;
  const Eigen::MatrixXd& nb = red.null_basis;

  red.b = goal_sign * (nb.transpose() * obj.w);
  red.objective_offset = goal_sign * (obj.w.dot(red.theta0) + obj.offset);

  for (const auto& p : problem.psd_constraints()) {
    const auto compiled = compile_psd(p.expr, par);
    const int d = p.expr.dim();
    CMatrix c0 = compiled.constant;
    for (const auto& [k, h] : compiled.linear) c0 += red.theta0(k) * h;
    Block blk;
    blk.n = 2 * d;
    blk.c = embed(c0);
    blk.a = Eigen::MatrixXd::Zero(blk.n * blk.n, m);
    for (const auto& [k, h] : compiled.linear) {
      const Eigen::MatrixXd eh = embed(h);
      const Eigen::Map<const Eigen::VectorXd> v(eh.data(), eh.size());
      for (int i = 0; i < m; ++i) {
        const double w = nb(k, i);
        if (w != 0.0) blk.a.col(i) -= w * v;
      }
    }
    red.blocks.push_back(std::move(blk));
  }
  red.scalar_block.assign(scalars.size(), -1);
  for (std::size_t s = 0; s < scalars.size(); ++s) {
    const auto& sc = scalars[s];
    if (sc.sense == Sense::Equal) continue;
    // slack = sign * (rhs - lhs) >= 0
    const double sign = sc.sense == Sense::LessEqual ? 1.0 : -1.0;
    Block blk;
    blk.n = 1;
    blk.c = Eigen::MatrixXd::Constant(1, 1, sign * (sc.rhs - sc.offset - sc.w.dot(red.theta0)));
    blk.a = (sign * (nb.transpose() * sc.w)).transpose();
    red.scalar_block[s] = static_cast<int>(red.blocks.size());
    red.blocks.push_back(std::move(blk));
  }

  const auto& blocks = red.blocks;
  const std::size_t nb_blocks = blocks.size();
  if (nb_blocks == 0 || m == 0) {
    // TODO: handle fully determined problems by checking the fixed point directly.
    sol.status = Status::NumericalError;
    sol.message = m == 0 ? "no free parameters after eliminating equalities" : "problem has no cone constraints";
    return sol;
  }

  // Starting point.
  int n_total = 0;
  double c_norm = 0.0;
  for (const auto& blk : blocks) {
    n_total += blk.n;
    c_norm += blk.c.squaredNorm();
  }
  c_norm = std::sqrt(c_norm);
  const double b_norm = red.b.norm();
  std::vector<Eigen::MatrixXd> x(nb_blocks), z(nb_blocks);
  for (std::size_t j = 0; j < nb_blocks; ++j) {
    const auto& blk = blocks[j];
    const double sn = std::sqrt(static_cast<double>(blk.n));
    double xi = std::max(10.0, sn);
    double eta = std::max(10.0, sn);
    for (int i = 0; i < m; ++i) {
      const double an = blk.a.col(i).norm();
      xi = std::max(xi, sn * (1.0 + std::abs(red.b(i))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    eta = std::max(eta, blk.c.norm());
    x[j] = xi * Eigen::MatrixXd::Identity(blk.n, blk.n);
    z[j] = eta * Eigen::MatrixXd::Identity(blk.n, blk.n);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double x_scale0 = 0.0;
  for (const auto& xj : x) x_scale0 += xj.trace();

  const double tol = options.tol;
  sol.status = Status::MaxIterations;
  sol.message = "iteration limit reached";
  int stalls = 0;
  struct {
    double score = std::numeric_limits<double>::infinity();
    int iteration = -1;
    std::vector<Eigen::MatrixXd> x, z;
    Eigen::VectorXd y;
    double gap = 0.0;
  } best;

  std::vector<Eigen::MatrixXd> rd(nb_blocks), zinv(nb_blocks), dx(nb_blocks), dz(nb_blocks);
  std::vector<Eigen::MatrixXd> dx_pred(nb_blocks), dz_pred(nb_blocks), work(nb_blocks);
  int it = 0;
  for (; it <= options.max_iter; ++it) {
    for (std::size_t j = 0; j < nb_blocks; ++j) rd[j] = blocks[j].c - z[j] - apply_adjoint(blocks[j], y);
    const Eigen::VectorXd rp = red.b - apply_op(blocks, x, m);
    double pobj = 0.0;
    for (std::size_t j = 0; j < nb_blocks; ++j) pobj += blocks[j].c.cwiseProduct(x[j]).sum();
    const double dobj = red.b.dot(y);
    const double gap = inner(x, z);
    const double mu = gap / n_total;
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = frob(rd) / (1.0 + c_norm);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double cgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));

    IterationRecord rec;
    rec.iteration = it;
    rec.objective = goal_sign * (dobj + red.objective_offset);
    rec.dual_bound = goal_sign * (pobj + red.objective_offset);
    rec.primal_infeasibility = dinf;
    rec.dual_infeasibility = pinf;
    rec.mu = mu;
    sol.history.push_back(rec);

    const double score = std::max({relgap, cgap, pinf, dinf});
    if (score < best.score) {
      best.score = score;
      best.iteration = it;
      best.x = x;
      best.z = z;
      best.y = y;
      best.gap = gap;
    }
    if (score <= tol) {
      sol.status = Status::Optimal;
      sol.message = "converged";
      break;
    }
    // Without a strictly feasible point the iterates eventually lose
    // accuracy; stop once the best point has not improved for a while.
    if (best.score < 1e-6 && it - best.iteration >= kStallWindow) {
      sol.status = Status::NumericalError;
      sol.message = "progress stalled";
      break;
    }

    // Infeasibility certificates, checked on normalized iterates.
    double x_trace = 0.0;
    for (const auto& xj : x) x_trace += xj.trace();
    if (x_trace > 1e8 * (1.0 + x_scale0) && pobj < 0.0) {
      const Eigen::VectorXd ax = apply_op(blocks, x, m) / x_trace;
      if (ax.norm() < 1e-6 && -pobj / x_trace > 1e-10) {
        sol.status = Status::Infeasible;
        sol.message = "constraints admit no feasible point (dual ray)";
        break;
      }
    }
    if (y.norm() > 1e8 * (1.0 + b_norm) && dobj > 0.0) {
      double worst = 0.0;
      for (std::size_t j = 0; j < nb_blocks; ++j) {
        const Eigen::MatrixXd at = apply_adjoint(blocks[j], y / y.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(-at), Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues()(0));
      }
      if (worst > -1e-6) {
        sol.status = Status::Unbounded;
        sol.message = "objective is unbounded (primal ray)";
        break;
      }
    }
    if (it == options.max_iter) break;

    bool chol_ok = true;
    for (std::size_t j = 0; j < nb_blocks; ++j) {
      Eigen::LLT<Eigen::MatrixXd> llt(z[j]);
      if (llt.info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      zinv[j] = llt.solve(Eigen::MatrixXd::Identity(blocks[j].n, blocks[j].n));
    }
    if (!chol_ok) {
      sol.status = Status::NumericalError;
      sol.message = "dual slack lost positive definiteness";
      break;
    }

    // Schur complement M_ij = sum_blocks <A_j, X A_i Z^-1>.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < nb_blocks; ++j) {
      const auto& blk = blocks[j];
      const int n = blk.n;
      Eigen::MatrixXd g(n * n, m);
      for (int i = 0; i < m; ++i) {
        const Eigen::Map<const Eigen::MatrixXd> ai(blk.a.col(i).data(), n, n);
        Eigen::Map<Eigen::MatrixXd> gi(g.col(i).data(), n, n);
        gi.noalias() = x[j] * ai * zinv[j];
      }
      schur.noalias() += g.transpose() * blk.a;
    }
    schur = sym(schur);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
    if (ldlt.info() != Eigen::Success) {
      sol.status = Status::NumericalError;
      sol.message = "Schur complement factorization failed";
      break;
    }

    // X Rd Z^-1 is shared by predictor and corrector.
    for (std::size_t j = 0; j < nb_blocks; ++j) work[j] = x[j] * rd[j] * zinv[j];
    const Eigen::VectorXd a_xrdz = apply_op(blocks, work, m);
    const Eigen::VectorXd a_x = red.b - rp;
    Eigen::VectorXd a_zinv = apply_op(blocks, zinv, m);

    auto direction = [&](double sigma_mu, const std::vector<Eigen::MatrixXd>* second_order, Eigen::VectorXd& dy) {
      Eigen::VectorXd rhs = rp - sigma_mu * a_zinv + a_x + a_xrdz;
      if (second_order) rhs += apply_op(blocks, *second_order, m);
      dy = ldlt.solve(rhs);
      for (std::size_t j = 0; j < nb_blocks; ++j) {
        dz[j] = rd[j] - apply_adjoint(blocks[j], dy);
        Eigen::MatrixXd t = sigma_mu * zinv[j] - x[j] - sym(x[j] * dz[j] * zinv[j]);
        if (second_order) t -= sym((*second_order)[j]);
        dx[j] = sym(t);
      }
    };

    Eigen::VectorXd dy;
    direction(0.0, nullptr, dy);
    const double ap_pred = std::min(1.0, max_step(x, dx));
    const double ad_pred = std::min(1.0, max_step(z, dz));
    double gap_pred = 0.0;
    for (std::size_t j = 0; j < nb_blocks; ++j) {
      gap_pred += (x[j] + ap_pred * dx[j]).cwiseProduct(z[j] + ad_pred * dz[j]).sum();
    }
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_pred, ad_pred), 2));
    const double sigma = std::clamp(std::pow(std::max(0.0, gap_pred) / gap, expon), 0.0, 1.0);

    for (std::size_t j = 0; j < nb_blocks; ++j) {
      dx_pred[j] = dx[j];
      dz_pred[j] = dz[j];
    }
    std::vector<Eigen::MatrixXd> second(nb_blocks);
    for (std::size_t j = 0; j < nb_blocks; ++j) second[j] = dx_pred[j] * dz_pred[j] * zinv[j];
    direction(sigma * mu, &second, dy);

    const double gamma = 0.9 + 0.09 * std::min(ap_pred, ad_pred);
    const double ap = std::min(1.0, gamma * max_step(x, dx));
    const double ad = std::min(1.0, gamma * max_step(z, dz));
    sol.history.back().step_primal = ad;
    sol.history.back().step_dual = ap;
    for (std::size_t j = 0; j < nb_blocks; ++j) {
      x[j] = sym(x[j] + ap * dx[j]);
      z[j] = sym(z[j] + ad * dz[j]);
    }
    y += ad * dy;

    if (std::max(ap, ad) < 1e-10) {
      if (++stalls >= 3) {
        sol.status = Status::NumericalError;
        sol.message = "step lengths collapsed";
        break;
      }
    } else {
      stalls = 0;
    }
  }
  sol.iterations = std::min(it, options.max_iter);

  // Report the best iterate; accept it if it meets the reporting bar.
  const bool certificate = sol.status == Status::Infeasible || sol.status == Status::Unbounded;
  if (!certificate && best.iteration >= 0) {
    x = best.x;
    z = best.z;
    y = best.y;
  }
  const auto& last = certificate || best.iteration < 0 ? sol.history.back() : sol.history[best.iteration];
  if (sol.status == Status::NumericalError || sol.status == Status::MaxIterations) {
    const double bar = kAcceptTol * (1.0 + std::abs(last.objective));
    if (std::abs(last.dual_bound - last.objective) <= bar && best.gap <= bar &&
        last.primal_infeasibility <= kAcceptTol && last.dual_infeasibility <= kAcceptTol) {
      sol.message += "; accepted at reduced accuracy";
      sol.status = Status::Optimal;
    }
  }

  const Eigen::VectorXd theta = red.theta0 + nb * y;
  sol.value = last.objective;
  sol.dual_bound = last.dual_bound;
  sol.gap = std::abs(sol.dual_bound - sol.value);
  sol.primal_infeasibility = last.primal_infeasibility;
  sol.dual_infeasibility = last.dual_infeasibility;
  for (std::size_t v = 0; v < problem.variables().size(); ++v) sol.variables.push_back(par.value(static_cast<int>(v), theta));

  // Report constraint status on the recovered point itself.
  for (const auto& p : problem.psd_constraints()) {
    const auto compiled = compile_psd(p.expr, par);
    CMatrix val = compiled.constant;
    for (const auto& [k, h] : compiled.linear) val += theta(k) * h;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (val + val.adjoint()), Eigen::EigenvaluesOnly);
    sol.psd_min_eigenvalues.push_back(es.eigenvalues()(0));
  }
  for (std::size_t s = 0; s < scalars.size(); ++s) {
    const auto& sc = scalars[s];
    const double lhs = sc.w.dot(theta) + sc.offset;
    double slack = 0.0;
    switch (sc.sense) {
      case Sense::Equal: slack = -std::abs(lhs - sc.rhs); break;
      case Sense::LessEqual: slack = sc.rhs - lhs; break;
      case Sense::GreaterEqual: slack = lhs - sc.rhs; break;
    }
    sol.scalar_slacks.push_back(slack);
    const int blk = red.scalar_block[s];
    sol.scalar_multipliers.push_back(blk >= 0 ? x[blk](0, 0) : 0.0);
  }
  return sol;
}

}  // namespace homowit::sdp
