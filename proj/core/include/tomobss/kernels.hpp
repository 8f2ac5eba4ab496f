#pragma once

#include <cstddef>
#include <string>

#include "tomobss/types.hpp"

namespace tomobss {

enum class KernelKind { kLinear, kPolynomial, kGaussian };

/// Kernel selection for KPCA. Construct through the named factories; they
/// validate the parameters.
class KernelSpec {
 public:
  static KernelSpec linear();
  /// (c_i^H c_j + 1)^d, principal branch for non-integer d. d > 0.
  static KernelSpec polynomial(double order);
  /// exp(-||c_i - c_j||^2 / (2 sigma^2)) with a fixed sigma > 0.
  static KernelSpec gaussian_fixed(double sigma);
  /// Gaussian with sigma = beta * mean_j min_{i != j} ||c_i - c_j||.
  static KernelSpec gaussian_auto(double beta = 5.0);

  KernelKind kind() const noexcept { return kind_; }
  double order() const noexcept { return param_; }
  double sigma() const noexcept { return param_; }
  double beta() const noexcept { return param_; }
  bool auto_bandwidth() const noexcept { return auto_; }

  std::string describe() const;

 private:
  KernelSpec(KernelKind kind, double param, bool automatic)
      : kind_(kind), param_(param), auto_(automatic) {}

  KernelKind kind_;
  double param_;
  bool auto_;
};

/// sigma-hat = beta * mean_j min_{i != j} ||c_i - c_j||_2 over the columns of
/// `c`. Throws kDegenerateInput when every column coincides.
double estimate_gaussian_sigma(const CMatrix& c, double beta);

struct KernelMatrix {
  HermitianMatrix matrix;
  double bandwidth = 0.0;              // sigma actually used (Gaussian only)
  std::size_t branch_cut_hits = 0;     // polynomial bases on the negative real axis
};

/// K[i, j] = kappa(c_i, c_j) over the columns of `c`. Only the upper triangle
/// is evaluated; the lower one is its conjugate mirror.
KernelMatrix kernel_matrix(const CMatrix& c, const KernelSpec& kernel);
inline KernelMatrix kernel_matrix(const HermitianMatrix& c, const KernelSpec& kernel) {
  return kernel_matrix(c.matrix(), kernel);
}

}  // namespace tomobss
