// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/fock.hpp"

#include "homowit/log.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace homowit {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kCutoffWarn = 1e-6;

void check_dims(int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || dim_a > kMaxModeDim || dim_b > kMaxModeDim) {
    std::ostringstream os;
    os << "mode dimensions must lie in [1, " << kMaxModeDim << "], got " << dim_a << "x" << dim_b;
    throw std::invalid_argument(os.str());
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

BipartiteFockState::BipartiteFockState(int dim_a, int dim_b, CMatrix matrix)
    : dim_a_(dim_a), dim_b_(dim_b), matrix_(std::move(matrix)) {
  check_dims(dim_a, dim_b);
  const int d = dim_a * dim_b;
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("density matrix shape does not match mode dimensions");
  }
  const double herm_err = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > kHermitianTol) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max deviation " << herm_err << ")";
    throw std::invalid_argument(os.str());
  }
  // Symmetrize away rounding so downstream eigen-solvers see an exact Hermitian matrix.
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
  const double tr = trace();
  if (tr > 1.0 + kTraceTol || tr < -kTraceTol) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " outside [0, 1]";
    throw std::invalid_argument(os.str());
  }
}

BipartiteFockState BipartiteFockState::from_pure(int dim_a, int dim_b, const CVector& amplitudes) {
  if (amplitudes.size() != dim_a * dim_b) {
    throw std::invalid_argument("amplitude vector size does not match mode dimensions");
  }
  return BipartiteFockState(dim_a, dim_b, amplitudes * amplitudes.adjoint());
}

BipartiteFockState BipartiteFockState::product(const CMatrix& rho_a, const CMatrix& rho_b) {
  const int da = static_cast<int>(rho_a.rows());
  const int db = static_cast<int>(rho_b.rows());
  CMatrix m(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int k = 0; k < da; ++k) m.block(i * db, k * db, db, db) = rho_a(i, k) * rho_b;
  return BipartiteFockState(da, db, std::move(m));
}

BipartiteFockState BipartiteFockState::fock(int dim_a, int dim_b, int n_a, int n_b) {
  check_dims(dim_a, dim_b);
  if (n_a < 0 || n_a >= dim_a || n_b < 0 || n_b >= dim_b) {
    throw std::invalid_argument("Fock index outside truncated space");
  }
  CMatrix m = CMatrix::Zero(dim_a * dim_b, dim_a * dim_b);
  m(n_a * dim_b + n_b, n_a * dim_b + n_b) = 1.0;
  return BipartiteFockState(dim_a, dim_b, std::move(m));
}

double BipartiteFockState::trace() const { return matrix_.trace().real(); }

double BipartiteFockState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool BipartiteFockState::is_physical(double eig_tol) const {
  return trace() <= 1.0 + kTraceTol && min_eigenvalue() >= -eig_tol;
}

CMatrix BipartiteFockState::reduced(Party party) const {
  if (party == Party::A) {
    CMatrix r = CMatrix::Zero(dim_a_, dim_a_);
    for (int i = 0; i < dim_a_; ++i)
      for (int k = 0; k < dim_a_; ++k)
        for (int j = 0; j < dim_b_; ++j) r(i, k) += element(i, j, k, j);
    return r;
  }
  CMatrix r = CMatrix::Zero(dim_b_, dim_b_);
  for (int j = 0; j < dim_b_; ++j)
    for (int l = 0; l < dim_b_; ++l)
      for (int i = 0; i < dim_a_; ++i) r(j, l) += element(i, j, i, l);
  return r;
}

Eigen::VectorXd BipartiteFockState::marginal(Party party) const {
  return reduced(party).diagonal().real();
}

double BipartiteFockState::cutoff_population() const {
  double p = 0.0;
  for (int i = 0; i < dim_a_; ++i)
    for (int j = 0; j < dim_b_; ++j)
      if (i == dim_a_ - 1 || j == dim_b_ - 1) p += population(i, j);
  return p;
}

BipartiteFockState BipartiteFockState::mix(double w, const BipartiteFockState& other) const {
  if (other.dim_a_ != dim_a_ || other.dim_b_ != dim_b_) {
    throw std::invalid_argument("cannot mix states of different dimensions");
  }
  if (w < 0.0 || w > 1.0) throw std::invalid_argument("mixture weight outside [0, 1]");
  return BipartiteFockState(dim_a_, dim_b_, w * matrix_ + (1.0 - w) * other.matrix_);
}

BipartiteFockState make_tunable_state(double theta_deg, int dim) {
  if (!(theta_deg >= 0.0 && theta_deg <= 45.0)) {
    std::ostringstream os;
    os << "theta must lie in [0, 45] degrees, got " << theta_deg;
    throw std::invalid_argument(os.str());
  }
  if (dim < 2) throw std::invalid_argument("tunable state needs at least 2 levels per mode");
  const double two_theta = 2.0 * theta_deg * std::numbers::pi / 180.0;
  CVector psi = CVector::Zero(dim * dim);
  psi(0 * dim + 1) = std::cos(two_theta);
  psi(1 * dim + 0) = std::sin(two_theta);
  return BipartiteFockState::from_pure(dim, dim, psi);
}

std::vector<Eigen::MatrixXd> loss_kraus_operators(int dim, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "transmission must lie in [0, 1], got " << eta;
    throw std::invalid_argument(os.str());
  }
  // K_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>, k photons lost.
  std::vector<Eigen::MatrixXd> kraus;
  kraus.reserve(dim);
  for (int k = 0; k < dim; ++k) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = k; n < dim; ++n) {
      K(n - k, n) = std::sqrt(binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    kraus.push_back(std::move(K));
  }
  return kraus;
}

BipartiteFockState apply_loss(const BipartiteFockState& rho, double eta_a, double eta_b) {
  if (!rho.is_physical()) throw std::invalid_argument("apply_loss requires a physical state");
  const auto ka = loss_kraus_operators(rho.dim_a(), eta_a);
  const auto kb = loss_kraus_operators(rho.dim_b(), eta_b);
  if (rho.cutoff_population() > kCutoffWarn) {
    std::ostringstream os;
    os << "state populates the Fock cutoff (" << rho.cutoff_population()
       << "); truncated channels ignore higher levels";
    warn(os.str());
  }
  const int d = rho.dim();
  CMatrix out = CMatrix::Zero(d, d);
  for (const auto& a : ka) {
    for (const auto& b : kb) {
      Eigen::MatrixXd k(d, d);
      for (int i = 0; i < rho.dim_a(); ++i)
        for (int j = 0; j < rho.dim_a(); ++j)
          k.block(i * rho.dim_b(), j * rho.dim_b(), rho.dim_b(), rho.dim_b()) = a(i, j) * b;
      out.noalias() += k.cast<Complex>() * rho.matrix() * k.transpose().cast<Complex>();
    }
  }
  return BipartiteFockState(rho.dim_a(), rho.dim_b(), std::move(out));
}

CMatrix partial_transpose(const CMatrix& matrix, int dim_a, int dim_b, Party party) {
  const int d = dim_a * dim_b;
  if (matrix.rows() != d || matrix.cols() != d) {
    throw std::invalid_argument("partial_transpose: matrix shape does not match mode dimensions");
  }
  CMatrix out(d, d);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k)
        for (int l = 0; l < dim_b; ++l) {
          const Complex v = matrix(i * dim_b + j, k * dim_b + l);
          if (party == Party::B) {
            out(i * dim_b + l, k * dim_b + j) = v;
          } else {
            out(k * dim_b + j, i * dim_b + l) = v;
          }
        }
  return out;
}

std::array<int, 4> qubit_subspace_indices(int dim_b) {
  return {0, 1, dim_b, dim_b + 1};
}

std::vector<int> tail_subspace_indices(int dim_a, int dim_b) {
  std::vector<int> idx;
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j)
      if (i >= 2 || j >= 2) idx.push_back(i * dim_b + j);
  return idx;
}

CMatrix project_qubit_subspace(const BipartiteFockState& rho) {
  if (rho.dim_a() < 2 || rho.dim_b() < 2) {
    throw std::invalid_argument("qubit projection needs at least 2 levels per mode");
  }
  const auto q = qubit_subspace_indices(rho.dim_b());
  CMatrix block(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) block(r, c) = rho.matrix()(q[r], q[c]);
  return block;
}

BlockDecomposition decompose_blocks(const BipartiteFockState& rho) {
  BlockDecomposition out;
  out.qubit_block = project_qubit_subspace(rho);
  const auto q = qubit_subspace_indices(rho.dim_b());
  const auto t = tail_subspace_indices(rho.dim_a(), rho.dim_b());
  const int nt = static_cast<int>(t.size());
  out.coherence_block.resize(4, nt);
  out.tail_block.resize(nt, nt);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < nt; ++c) out.coherence_block(r, c) = rho.matrix()(q[r], t[c]);
  for (int r = 0; r < nt; ++r)
    for (int c = 0; c < nt; ++c) out.tail_block(r, c) = rho.matrix()(t[r], t[c]);
  out.tail_weight = rho.trace() - out.qubit_block.trace().real();
  return out;
}

}  // namespace homowit
