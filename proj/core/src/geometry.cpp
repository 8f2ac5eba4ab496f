#include "tomobss/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomobss/error.hpp"

namespace tomobss {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::kInvalidInput, std::string(what) + " is not finite");
}

}  // namespace

AcquisitionGeometry::AcquisitionGeometry(std::vector<double> baselines_m, double wavelength_m,
                                         double range_m)
    : baselines_(std::move(baselines_m)), wavelength_(wavelength_m), range_(range_m) {
  if (baselines_.size() < 2) fail(ErrorKind::kInvalidInput, "at least two baselines are required");
  for (double b : baselines_) require_finite(b, "baseline");
  require_finite(wavelength_, "wavelength");
  require_finite(range_, "range");
  if (wavelength_ <= 0.0) fail(ErrorKind::kInvalidInput, "wavelength must be positive");
  if (range_ <= 0.0) fail(ErrorKind::kInvalidInput, "range must be positive");
  if (aperture() <= 0.0) fail(ErrorKind::kDegenerateGeometry, "baselines span zero aperture");
}

AcquisitionGeometry AcquisitionGeometry::default_simulation() {
  std::vector<double> b;
  for (int i = -4; i <= 4; ++i) b.push_back(50.0 * i);
  // lambda * r = 21840 m^2 puts the Rayleigh resolution at 27.3 m over a 400 m aperture.
  return AcquisitionGeometry(std::move(b), 0.031, 21840.0 / 0.031);
}

double AcquisitionGeometry::aperture() const noexcept {
  auto [lo, hi] = std::minmax_element(baselines_.begin(), baselines_.end());
  return *hi - *lo;
}

double AcquisitionGeometry::elevation_frequency(std::size_t n) const {
  return kFourPi * baselines_.at(n) / (wavelength_ * range_);
}

std::optional<double> AcquisitionGeometry::ambiguity_period() const {
  const double b0 = *std::min_element(baselines_.begin(), baselines_.end());
  double spacing = 0.0;
  for (double b : baselines_) {
    const double d = b - b0;
    if (d > 1e-9 * aperture() && (spacing == 0.0 || d < spacing)) spacing = d;
  }
  if (spacing <= 0.0) return std::nullopt;
  for (double b : baselines_) {
    const double q = (b - b0) / spacing;
    if (std::abs(q - std::round(q)) > 1e-6) return std::nullopt;
  }
  return wavelength_ * range_ / (2.0 * spacing);
}

SteeringVector::SteeringVector(CVector values) : v_(std::move(values)) {
  if (!v_.allFinite()) fail(ErrorKind::kInvalidInput, "steering vector has non-finite entries");
  const double n = v_.norm();
  if (n <= 0.0) fail(ErrorKind::kInvalidInput, "steering vector is zero");
  v_ /= n;
}

double line_of_sight_motion(const std::vector<DeformationTerm>& terms, std::size_t n) {
  double d = 0.0;
  for (const auto& t : terms) d += t.coefficient * t.basis.at(n);
  return d;
}

SteeringVector steering_vector(const AcquisitionGeometry& geom, const ScattererParams& scatterer) {
  require_finite(scatterer.elevation_m, "elevation");
  const std::size_t n_img = geom.images();
  for (const auto& t : scatterer.deformation) {
    require_finite(t.coefficient, "deformation coefficient");
    if (t.basis.size() != n_img)
      fail(ErrorKind::kInvalidInput, "deformation basis needs one value per image");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_img));
  CVector r(static_cast<Eigen::Index>(n_img));
  for (std::size_t n = 0; n < n_img; ++n) {
    const double phase = geom.elevation_frequency(n) * scatterer.elevation_m +
                         kFourPi * line_of_sight_motion(scatterer.deformation, n) / geom.wavelength();
    r(static_cast<Eigen::Index>(n)) = std::polar(scale, -phase);
  }
  return SteeringVector(std::move(r));
}

SteeringVector steering_vector(const AcquisitionGeometry& geom, double elevation_m) {
  return steering_vector(geom, ScattererParams{elevation_m, 1.0, {}});
}

double rayleigh_resolution(const AcquisitionGeometry& geom) {
  const double span = geom.aperture();
  if (span <= 0.0) fail(ErrorKind::kDegenerateGeometry, "zero aperture");
  return geom.wavelength() * geom.range() / (2.0 * span);
}

HermitianMatrix model_covariance(const AcquisitionGeometry& geom,
                                 const std::vector<ScattererParams>& scatterers,
                                 double noise_power) {
  if (!(noise_power >= 0.0)) fail(ErrorKind::kInvalidInput, "noise power must be non-negative");
  const auto n = static_cast<Eigen::Index>(geom.images());
  CMatrix c = noise_power * CMatrix::Identity(n, n);
  for (const auto& s : scatterers) {
    if (!(s.amplitude >= 0.0)) fail(ErrorKind::kInvalidInput, "amplitude must be non-negative");
    const CVector r = steering_vector(geom, s).values();
    c.noalias() += s.intensity() * r * r.adjoint();
  }
  return HermitianMatrix::symmetrized(std::move(c));
}

}  // namespace tomobss
