#include "tomobss/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tomobss/error.hpp"

namespace tomobss {

KernelSpec KernelSpec::linear() { return KernelSpec(KernelKind::kLinear, 0.0, false); }

KernelSpec KernelSpec::polynomial(double order) {
  if (!(order > 0.0) || !std::isfinite(order))
    fail(ErrorKind::kInvalidInput, "polynomial order must be positive");
  return KernelSpec(KernelKind::kPolynomial, order, false);
}

KernelSpec KernelSpec::gaussian_fixed(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorKind::kInvalidInput, "Gaussian bandwidth must be positive");
  return KernelSpec(KernelKind::kGaussian, sigma, false);
}

KernelSpec KernelSpec::gaussian_auto(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorKind::kInvalidInput, "Gaussian bandwidth factor beta must be positive");
  return KernelSpec(KernelKind::kGaussian, beta, true);
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case KernelKind::kLinear:
      os << "linear";
      break;
    case KernelKind::kPolynomial:
      os << "polynomial(d=" << param_ << ")";
      break;
    case KernelKind::kGaussian:
      if (auto_)
        os << "gaussian(beta=" << param_ << ")";
      else
        os << "gaussian(sigma=" << param_ << ")";
      break;
  }
  return os.str();
}

double estimate_gaussian_sigma(const CMatrix& c, double beta) {
  if (!(beta > 0.0)) fail(ErrorKind::kInvalidInput, "beta must be positive");
  const Eigen::Index n = c.cols();
  if (n < 2) fail(ErrorKind::kInvalidInput, "bandwidth estimate needs at least two columns");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      nearest = std::min(nearest, (c.col(i) - c.col(j)).norm());
    }
    sum += nearest;
  }
  const double sigma = beta * sum / static_cast<double>(n);
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorKind::kDegenerateInput, "all columns coincide; bandwidth estimate is zero");
  return sigma;
}

KernelMatrix kernel_matrix(const CMatrix& c, const KernelSpec& kernel) {
  const Eigen::Index n = c.cols();
  CMatrix k(n, n);
  KernelMatrix out;
  switch (kernel.kind()) {
    case KernelKind::kLinear:
      k = c.adjoint() * c;
      break;
    case KernelKind::kPolynomial: {
      const CMatrix gram = c.adjoint() * c;
      const double d = kernel.order();
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          const cdouble base = gram(i, j) + 1.0;
          if (base.imag() == 0.0 && base.real() < 0.0) ++out.branch_cut_hits;
          // std::pow(complex, double) is exp(d * Log z) on the principal branch.
          const cdouble v = std::pow(base, d);
          k(i, j) = v;
          k(j, i) = std::conj(v);
        }
        k(j, j) = k(j, j).real();
      }
      break;
    }
    case KernelKind::kGaussian: {
      const double sigma =
          kernel.auto_bandwidth() ? estimate_gaussian_sigma(c, kernel.beta()) : kernel.sigma();
      out.bandwidth = sigma;
      const double denom = 2.0 * sigma * sigma;
      for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = 1.0;
        for (Eigen::Index i = 0; i < j; ++i) {
          const double v = std::exp(-(c.col(i) - c.col(j)).squaredNorm() / denom);
          k(i, j) = v;
          k(j, i) = v;
        }
      }
      break;
    }
  }
  out.matrix = HermitianMatrix::symmetrized(std::move(k));
  return out;
}

}  // namespace tomobss
