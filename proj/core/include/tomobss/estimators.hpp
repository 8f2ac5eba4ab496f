#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tomobss/separation.hpp"
#include "tomobss/simulator.hpp"
#include "tomobss/types.hpp"

namespace tomobss {

enum class CovarianceKind { kSample, kSign };

HermitianMatrix estimate_covariance(const ObservationStack& stack, CovarianceKind kind);

using CovarianceEstimator = std::function<std::vector<ScattererEstimate>(const HermitianMatrix&)>;

/// Leading eigenvectors as steering estimates (unit norm, not amplitude
/// dropped) with their eigenvalues as intensities.
std::vector<ScattererEstimate> pca_estimates(const HermitianMatrix& c, std::size_t components);

CovarianceEstimator pca_estimator(std::size_t components = 2);

/// Full separation loop; a no-signal outcome is raised as kNoSignal.
CovarianceEstimator kpca_estimator(const SeparationOptions& options);

/// First kernel PCA component only, as used by kernel-parameter sweeps.
CovarianceEstimator dominant_estimator(const KernelSpec& kernel, const KpcaOptions& options = {});

/// Lifts a covariance-level estimator to observation stacks.
Estimator on_stacks(CovarianceEstimator estimator, CovarianceKind kind = CovarianceKind::kSample);

}  // namespace tomobss
