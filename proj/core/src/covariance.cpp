#include "tomobss/covariance.hpp"

#include <sstream>

#include "tomobss/error.hpp"

namespace tomobss {

HermitianMatrix HermitianMatrix::symmetrized(CMatrix m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << ", expected square";
    fail(ErrorKind::kInvalidInput, os.str());
  }
  CMatrix h = 0.5 * (m + m.adjoint());
  return HermitianMatrix(std::move(h));
}

HermitianMatrix HermitianMatrix::checked(CMatrix m, double rel_tol) {
  if (m.rows() != m.cols()) return symmetrized(std::move(m));
  const double scale = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (asym > rel_tol * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian (||A - A^H|| = " << asym << ", ||A|| = " << scale << ")";
    fail(ErrorKind::kInvalidInput, os.str());
  }
  return symmetrized(std::move(m));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

RVector HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

HermitianMatrix sample_covariance(const ObservationStack& stack) {
  const auto& g = stack.samples();
  if (g.cols() < 1 || g.rows() < 1) fail(ErrorKind::kInvalidInput, "empty observation stack");
  CMatrix c = CMatrix::Zero(g.rows(), g.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0 / static_cast<double>(g.cols()));
  c = c.selfadjointView<Eigen::Lower>();
  return HermitianMatrix::symmetrized(std::move(c));
}

SignCovariance sign_covariance(const ObservationStack& stack) {
  const auto& g = stack.samples();
  if (g.cols() < 1 || g.rows() < 1) fail(ErrorKind::kInvalidInput, "empty observation stack");
  CMatrix c = CMatrix::Zero(g.rows(), g.rows());
  std::size_t skipped = 0;
  for (Eigen::Index m = 0; m < g.cols(); ++m) {
    const double norm = g.col(m).norm();
    if (!(norm >= 1e-300)) {
      ++skipped;
      continue;
    }
    const CVector u = g.col(m) / norm;
    c.noalias() += u * u.adjoint();
  }
  if (skipped == static_cast<std::size_t>(g.cols()))
    fail(ErrorKind::kDegenerateInput, "every column of the stack is zero");
  c /= static_cast<double>(g.cols());
  return {HermitianMatrix::symmetrized(std::move(c)), skipped};
}

HermitianMatrix center_kernel(const HermitianMatrix& kernel) {
  const CMatrix& k = kernel.matrix();
  // H K H without forming H: subtract row means, column means, add grand mean.
  const CVector col_mean = k.colwise().mean().transpose();
  const CVector row_mean = k.rowwise().mean();
  const cdouble grand = k.mean();
  CMatrix out = k;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean.transpose();
  out.array() += grand;
  return HermitianMatrix::symmetrized(std::move(out));
}

}  // namespace tomobss
