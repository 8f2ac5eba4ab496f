#pragma once

#include <optional>
#include <vector>

#include "tomobss/types.hpp"

namespace tomobss {

/// Multibaseline acquisition geometry: perpendicular baselines B_n, radar
/// wavelength and slant range. Validated on construction.
class AcquisitionGeometry {
 public:
  AcquisitionGeometry(std::vector<double> baselines_m, double wavelength_m, double range_m);

  /// Nine images, baselines -200..200 m in 50 m steps, lambda*r = 21840 m^2.
  static AcquisitionGeometry default_simulation();

  const std::vector<double>& baselines() const noexcept { return baselines_; }
  double wavelength() const noexcept { return wavelength_; }
  double range() const noexcept { return range_; }
  std::size_t images() const noexcept { return baselines_.size(); }
  double aperture() const noexcept;

  /// Elevation frequency 4*pi*B_n / (lambda*r) of image n, rad/m.
  double elevation_frequency(std::size_t n) const;

  /// Elevation period of the steering manifold when every baseline lies on a
  /// common lattice (all B_n - B_0 integer multiples of one spacing), else
  /// nullopt. Uniform stacks are periodic in elevation with lambda*r/(2*b).
  std::optional<double> ambiguity_period() const;

 private:
  std::vector<double> baselines_;
  double wavelength_;
  double range_;
};

/// Scalar coefficient multiplying a per-image motion basis, e.g. a linear
/// rate (m/yr) with the image time offsets (yr) as basis.
struct DeformationTerm {
  double coefficient = 0.0;
  std::vector<double> basis;
};

struct ScattererParams {
  double elevation_m = 0.0;
  double amplitude = 1.0;  // sigma_k, linear; intensity is amplitude^2
  std::vector<DeformationTerm> deformation;

  double intensity() const noexcept { return amplitude * amplitude; }
};

/// Unit-norm steering vector; every entry has modulus 1/sqrt(N).
class SteeringVector {
 public:
  /// Normalizes `values` to unit norm. Throws if zero or non-finite.
  explicit SteeringVector(CVector values);

  const CVector& values() const noexcept { return v_; }
  Eigen::Index size() const noexcept { return v_.size(); }

 private:
  CVector v_;
};

/// Line-of-sight displacement d_n of image n under `terms`.
double line_of_sight_motion(const std::vector<DeformationTerm>& terms, std::size_t n);

/// r_n = exp(-j (4 pi B_n s / (lambda r) + 4 pi d_n / lambda)) / sqrt(N).
SteeringVector steering_vector(const AcquisitionGeometry& geom, const ScattererParams& scatterer);
SteeringVector steering_vector(const AcquisitionGeometry& geom, double elevation_m);

/// lambda * r / (2 * aperture).
double rayleigh_resolution(const AcquisitionGeometry& geom);

/// sum_k sigma_k^2 r_k r_k^H + noise_power * I.
HermitianMatrix model_covariance(const AcquisitionGeometry& geom,
                                 const std::vector<ScattererParams>& scatterers,
                                 double noise_power);

}  // namespace tomobss
