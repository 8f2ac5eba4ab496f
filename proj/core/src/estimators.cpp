#include "tomobss/estimators.hpp"

#include <algorithm>
#include <utility>

#include "tomobss/covariance.hpp"
#include "tomobss/error.hpp"

namespace tomobss {

HermitianMatrix estimate_covariance(const ObservationStack& stack, CovarianceKind kind) {
  return kind == CovarianceKind::kSign ? sign_covariance(stack).matrix : sample_covariance(stack);
}

std::vector<ScattererEstimate> pca_estimates(const HermitianMatrix& c, std::size_t components) {
  const auto eig = pca_components(c);
  const auto k = std::min<std::size_t>(components, static_cast<std::size_t>(eig.values.size()));
  std::vector<ScattererEstimate> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.push_back({eig.vectors.col(idx), std::max(0.0, eig.values(idx))});
  }
  return out;
}

CovarianceEstimator pca_estimator(std::size_t components) {
  return [components](const HermitianMatrix& c) { return pca_estimates(c, components); };
}

CovarianceEstimator kpca_estimator(const SeparationOptions& options) {
  return [options](const HermitianMatrix& c) {
    auto result = separate_scatterers(c, options);
    if (result.diagnostics.no_signal) fail(ErrorKind::kNoSignal, result.diagnostics.message);
    return std::move(result.estimates);
  };
}

CovarianceEstimator dominant_estimator(const KernelSpec& kernel, const KpcaOptions& options) {
  return [kernel, options](const HermitianMatrix& c) {
    const auto d = kpca_dominant(c, kernel, options);
    return std::vector<ScattererEstimate>{{d.steering, rayleigh_intensity(c, d.steering)}};
  };
}

Estimator on_stacks(CovarianceEstimator estimator, CovarianceKind kind) {
  return [estimator = std::move(estimator), kind](const ObservationStack& stack) {
    return estimator(estimate_covariance(stack, kind));
  };
}

}  // namespace tomobss
