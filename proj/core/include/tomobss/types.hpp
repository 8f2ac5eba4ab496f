#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace tomobss {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Square complex matrix that is Hermitian by construction.
///
/// Every constructor re-symmetrizes (A + A^H) / 2, so accumulated rounding in
/// covariance or kernel builders can never leak an anti-Hermitian part into
/// the eigensolvers downstream.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Symmetrizes `m`. Throws kInvalidInput if `m` is not square.
  static HermitianMatrix symmetrized(CMatrix m);

  /// Like symmetrized(), but first rejects inputs whose anti-Hermitian part
  /// exceeds `rel_tol * ||m||_F`.
  static HermitianMatrix checked(CMatrix m, double rel_tol = 1e-12);

  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix zero(Eigen::Index n);

  const CMatrix& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }
  double trace() const { return m_.diagonal().real().sum(); }
  double frobenius_norm() const { return m_.norm(); }

  /// Eigenvalues in ascending order.
  RVector eigenvalues() const;

 private:
  explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

/// N x M matrix of M multibaseline samples; column m is one observation g_m.
class ObservationStack {
 public:
  ObservationStack() = default;
  explicit ObservationStack(CMatrix samples) : g_(std::move(samples)) {}

  const CMatrix& samples() const noexcept { return g_; }
  Eigen::Index images() const noexcept { return g_.rows(); }
  Eigen::Index looks() const noexcept { return g_.cols(); }

 private:
  CMatrix g_;
};

}  // namespace tomobss
