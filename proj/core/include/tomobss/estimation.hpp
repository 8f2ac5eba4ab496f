#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tomobss/geometry.hpp"
#include "tomobss/types.hpp"

namespace tomobss {

/// One deformation dimension of a multi-dimensional periodogram: candidate
/// coefficients [min, max] in `step` increments, each multiplying `basis`.
struct DeformationAxis {
  std::vector<double> basis;
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
};

struct PeriodogramGrid {
  double min_elevation = 0.0;
  double max_elevation = 0.0;
  double step = 1.0;
  std::vector<DeformationAxis> deformation;
  std::size_t max_points = 1'000'000;

  std::size_t elevation_points() const;
  std::size_t points() const;
  /// Throws kInvalidInput on non-positive steps, empty ranges or a point count
  /// above max_points.
  void validate(std::size_t images) const;

  /// Step = Rayleigh / 100. The range is one ambiguity period centred on 0
  /// when the baselines lie on a lattice, else +-1.5 * N * Rayleigh.
  static PeriodogramGrid default_for(const AcquisitionGeometry& geom);
};

struct PeriodogramOptions {
  bool refine_peak = false;
  bool keep_profile = false;
};

struct PeriodogramSample {
  double elevation = 0.0;
  std::vector<double> deformation;
  double coherence = 0.0;
};

struct PeriodogramResult {
  double elevation = 0.0;
  std::vector<double> deformation;
  double peak_coherence = 0.0;
  std::vector<PeriodogramSample> profile;  // filled when keep_profile is set
};

/// Grid search of |r(s, p)^H r_hat| / ||r_hat||. Ties go to the smallest
/// elevation, then the smallest deformation coefficients. Throws kNoPeak on a
/// flat profile.
PeriodogramResult periodogram(const CVector& estimate, const AcquisitionGeometry& geom,
                              const PeriodogramGrid& grid, const PeriodogramOptions& options = {});

/// CSV with columns s_m, p_1.., coherence.
void write_profile_csv(std::ostream& os, const PeriodogramResult& result);

/// arccos |a^H b| of the normalized arguments, degrees in [0, 90].
double angular_bias(const CVector& estimate, const CVector& truth);

/// angular_bias(estimate, truth) / angular_bias(other, truth).
double relative_angular_bias(const CVector& estimate, const CVector& truth, const CVector& other);

/// (1/N) |ybar^H rbar| on unit-modulus (amplitude-dropped) versions.
double ensemble_coherence(const CVector& estimate, const CVector& truth);

/// Element-wise phase error of `estimate` against `truth` in degrees, with the
/// mean offset removed, wrapped to (-180, 180].
RVector per_baseline_phase_bias(const CVector& estimate, const CVector& truth);

}  // namespace tomobss
