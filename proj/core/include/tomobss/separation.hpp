#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tomobss/kernels.hpp"
#include "tomobss/types.hpp"

namespace tomobss {

/// Eigenpairs sorted by descending eigenvalue. Each column is unit norm and
/// phase-normalized so that its largest-modulus entry is real positive.
struct EigenDecomposition {
  CMatrix vectors;
  RVector values;
};

EigenDecomposition pca_components(const HermitianMatrix& c);

/// Replaces every entry by its phase factor scaled 1/sqrt(N), then rotates the
/// global phase so entry 0 is real positive. Zero entries take phase 0.
CVector amplitude_drop(const CVector& v);

/// How the dominant kernel component is mapped back to an N-vector.
enum class SteeringExtraction {
  /// y = C v_1 / sqrt(s_1): the dominant feature-space direction expressed as
  /// a combination of the input columns. Reduces to PCA for the linear kernel.
  kPreImage,
  /// y = K v_1 / sqrt(s_1), the first column of the projected data. Only
  /// meaningful for complex kernels (linear, polynomial).
  kProjection,
};

struct KpcaOptions {
  bool center = true;
  SteeringExtraction extraction = SteeringExtraction::kPreImage;
};

struct DominantComponent {
  CVector steering;  // amplitude-dropped, unit norm, entries 1/sqrt(N)
  CVector weights;   // first eigenvector of the (centered) kernel matrix
  double eigenvalue = 0.0;
  double bandwidth = 0.0;
  std::size_t branch_cut_hits = 0;
};

/// Dominant scatterer direction from kernel PCA on the columns of `c`.
/// Throws kNoSignal when the top kernel eigenvalue is below 1e-12 * trace(K).
DominantComponent kpca_dominant(const HermitianMatrix& c, const KernelSpec& kernel,
                                const KpcaOptions& options = {});

/// Rayleigh-quotient intensity of the phase pattern of `y`, on the scale of
/// unit-norm steering vectors: for C = sigma^2 r r^H and y ~ r it returns
/// sigma^2. Equals N times (1/N) (y^H C y) / (y^H y) evaluated on the
/// unit-modulus vector. Clamped at zero.
double rayleigh_intensity(const HermitianMatrix& c, const CVector& y);

struct Deflation {
  HermitianMatrix residual;
  bool strongly_negative = false;  // min eigenvalue < -0.1 * trace(input)
};

/// C - sigma^2 r r^H with r the unit-norm phase pattern of `y`.
Deflation deflate(const HermitianMatrix& c, const CVector& y, double intensity);

struct ScattererEstimate {
  CVector steering;
  double intensity = 0.0;
};

struct PairIntensities {
  double first = 0.0;
  double second = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Alternating Rayleigh re-estimation of two intensities with fixed steering
/// estimates. Flags (converged = false) when the two estimates coincide.
PairIntensities reestimate_two(const HermitianMatrix& c, const CVector& first,
                               const CVector& second, std::size_t max_iters = 100,
                               double tol = 1e-12);

struct PairRefinement {
  ScattererEstimate first;
  ScattererEstimate second;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Alternately re-extracts each of two scatterers from C minus the current
/// contribution of the other one (kernel PCA plus Rayleigh intensity), until
/// neither steering estimate moves by more than `tol_deg`.
PairRefinement refine_pair(const HermitianMatrix& c, const ScattererEstimate& first,
                           const ScattererEstimate& second, const KernelSpec& kernel,
                           const KpcaOptions& options = {}, std::size_t max_iters = 100,
                           double tol_deg = 1e-8);

struct SeparationOptions {
  KernelSpec kernel = KernelSpec::gaussian_auto(5.0);
  std::size_t max_scatterers = 2;
  /// Stop once sigma_k^2 < stop_threshold * trace(C_0) / N.
  double stop_threshold = 0.05;
  bool center = true;
  SteeringExtraction extraction = SteeringExtraction::kPreImage;
  /// With exactly two scatterers, alternate re-extraction of both.
  bool refine_pair = true;
  /// With exactly two scatterers and refine_pair off, re-estimate intensities.
  bool reestimate_intensities = false;
  std::size_t refine_max_iters = 100;
  double refine_tol_deg = 1e-8;
};

struct SeparationDiagnostics {
  bool no_signal = false;
  std::string message;
  std::size_t rejected_below_threshold = 0;
  std::size_t branch_cut_hits = 0;
  bool negative_residual = false;
  bool refined = false;
  bool refine_converged = false;
  std::size_t refine_iterations = 0;
};

struct SeparationResult {
  std::vector<ScattererEstimate> estimates;  // descending intensity
  HermitianMatrix residual;                  // C_0 - sum sigma_k^2 r_k r_k^H
  std::size_t iterations = 0;                // kernel PCA passes in the main loop
  SeparationDiagnostics diagnostics;
};

/// Sequential kernel-PCA separation with covariance deflation.
SeparationResult separate_scatterers(const HermitianMatrix& c, const SeparationOptions& options = {});

/// Eigenvalue minimum-description-length model order for an N x N covariance
/// estimated from `looks` samples, clamped to `max_order`.
std::size_t estimate_model_order(const HermitianMatrix& c, std::size_t looks,
                                 std::size_t max_order = static_cast<std::size_t>(-1));

}  // namespace tomobss
