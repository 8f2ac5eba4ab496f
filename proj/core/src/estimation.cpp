#include "tomobss/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "tomobss/error.hpp"

namespace tomobss {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::size_t axis_points(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double wrap_deg(double d) {
  double w = std::remainder(d, 360.0);
  if (w <= -180.0) w += 360.0;
  return w;
}

}  // namespace

std::size_t PeriodogramGrid::elevation_points() const {
  return axis_points(min_elevation, max_elevation, step);
}

std::size_t PeriodogramGrid::points() const {
  std::size_t total = elevation_points();
  for (const auto& a : deformation) total *= axis_points(a.min, a.max, a.step);
  return total;
}

void PeriodogramGrid::validate(std::size_t images) const {
  if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorKind::kInvalidInput, "elevation step must be positive");
  if (!(max_elevation >= min_elevation)) fail(ErrorKind::kInvalidInput, "empty elevation range");
  for (const auto& a : deformation) {
    if (!(a.step > 0.0)) fail(ErrorKind::kInvalidInput, "deformation step must be positive");
    if (!(a.max >= a.min)) fail(ErrorKind::kInvalidInput, "empty deformation range");
    if (a.basis.size() != images) fail(ErrorKind::kInvalidInput, "deformation basis needs one value per image");
  }
  // Checked in floating point so absurd grids cannot overflow the count.
  double total = static_cast<double>(elevation_points());
  for (const auto& a : deformation) total *= static_cast<double>(axis_points(a.min, a.max, a.step));
  if (total > static_cast<double>(max_points)) fail(ErrorKind::kInvalidInput, "periodogram grid exceeds point cap");
}

PeriodogramGrid PeriodogramGrid::default_for(const AcquisitionGeometry& geom) {
  const double rho = rayleigh_resolution(geom);
  PeriodogramGrid g;
  g.step = rho / 100.0;
  if (const auto period = geom.ambiguity_period()) {
    // Half-open interval: the upper end aliases onto the lower one.
    g.min_elevation = -0.5 * *period;
    g.max_elevation = 0.5 * *period - 0.5 * g.step;
  } else {
    const double half = 1.5 * static_cast<double>(geom.images()) * rho;
    g.min_elevation = -half;
    g.max_elevation = half;
  }
  return g;
}

PeriodogramResult periodogram(const CVector& estimate, const AcquisitionGeometry& geom,
                              const PeriodogramGrid& grid, const PeriodogramOptions& options) {
  const std::size_t n = geom.images();
  if (static_cast<std::size_t>(estimate.size()) != n)
    fail(ErrorKind::kInvalidInput, "estimate length differs from the number of images");
  grid.validate(n);
  const double norm = estimate.norm();
  if (!(norm > 0.0)) fail(ErrorKind::kInvalidInput, "zero estimate");

  const std::size_t dims = grid.deformation.size();
  std::vector<std::size_t> extent(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& a = grid.deformation[d];
    extent[d] = axis_points(a.min, a.max, a.step);
  }
  const std::size_t inner = std::max<std::size_t>(1, grid.points() / grid.elevation_points());

  std::vector<double> freq(n);
  for (std::size_t i = 0; i < n; ++i) freq[i] = geom.elevation_frequency(i);
  const double k_def = 4.0 * std::numbers::pi / geom.wavelength();
  const double scale = 1.0 / (std::sqrt(static_cast<double>(n)) * norm);

  // motion[i] = line-of-sight displacement of image i for deformation index q.
  std::vector<double> coeffs(dims);
  std::vector<double> motion(n);
  auto decode = [&](std::size_t q) {
    for (std::size_t d = dims; d-- > 0;) {
      const std::size_t idx = q % extent[d];
      q /= extent[d];
      coeffs[d] = grid.deformation[d].min + static_cast<double>(idx) * grid.deformation[d].step;
    }
    std::fill(motion.begin(), motion.end(), 0.0);
    for (std::size_t d = 0; d < dims; ++d)
      for (std::size_t i = 0; i < n; ++i) motion[i] += coeffs[d] * grid.deformation[d].basis[i];
  };

  auto coherence_at = [&](double s) {
    cdouble acc{0.0, 0.0};
    // r(s, p)^H r_hat with r_n = exp(-j phi_n) / sqrt(N)
    for (std::size_t i = 0; i < n; ++i)
      acc += std::polar(1.0, freq[i] * s + k_def * motion[i]) * estimate(static_cast<Eigen::Index>(i));
    return std::abs(acc) * scale;
  };

  const std::size_t ns = grid.elevation_points();
  PeriodogramResult out;
  double best = -1.0;
  double worst = std::numeric_limits<double>::infinity();
  std::size_t best_s = 0;
  std::size_t best_q = 0;
  std::vector<double> best_coeffs;
  if (options.keep_profile) out.profile.reserve(ns * inner);
  for (std::size_t is = 0; is < ns; ++is) {
    const double s = grid.min_elevation + static_cast<double>(is) * grid.step;
    for (std::size_t q = 0; q < inner; ++q) {
      decode(q);
      const double c = coherence_at(s);
      if (options.keep_profile) out.profile.push_back({s, coeffs, c});
      worst = std::min(worst, c);
      if (c > best) {
        best = c;
        best_s = is;
        best_q = q;
        best_coeffs = coeffs;
      }
    }
  }
  if (best - worst < 1e-12) fail(ErrorKind::kNoPeak, "periodogram profile is flat");

  out.elevation = grid.min_elevation + static_cast<double>(best_s) * grid.step;
  out.deformation = best_coeffs;
  out.peak_coherence = best;

  if (options.refine_peak && best_s > 0 && best_s + 1 < ns) {
    decode(best_q);
    const double lo = coherence_at(out.elevation - grid.step);
    const double hi = coherence_at(out.elevation + grid.step);
    const double curvature = lo - 2.0 * best + hi;
    if (curvature < 0.0) {
      const double offset = std::clamp(0.5 * (lo - hi) / curvature, -0.5, 0.5);
      out.elevation += offset * grid.step;
      out.peak_coherence = std::max(best, coherence_at(out.elevation));
    }
  }
  return out;
}

void write_profile_csv(std::ostream& os, const PeriodogramResult& result) {
  const std::size_t dims = result.profile.empty() ? result.deformation.size()
                                                  : result.profile.front().deformation.size();
  os << "s_m";
  for (std::size_t d = 0; d < dims; ++d) os << ",p_" << (d + 1);
  os << ",coherence\n";
  const auto old = os.precision(17);
  for (const auto& p : result.profile) {
    os << p.elevation;
    for (double v : p.deformation) os << ',' << v;
    os << ',' << p.coherence << '\n';
  }
  os.precision(old);
}

double angular_bias(const CVector& estimate, const CVector& truth) {
  if (estimate.size() != truth.size()) fail(ErrorKind::kInvalidInput, "vector lengths differ");
  const double ne = estimate.norm();
  const double nt = truth.norm();
  if (!(ne > 0.0) || !(nt > 0.0)) fail(ErrorKind::kInvalidInput, "zero vector in angular bias");
  const CVector a = estimate / ne;
  CVector b = truth / nt;
  const cdouble p = a.dot(b);
  if (std::abs(p) > 0.0) b *= std::conj(p) / std::abs(p);
  // Half-angle form of arccos |a^H b|; stays accurate near zero.
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm()) * kDeg;
}

double relative_angular_bias(const CVector& estimate, const CVector& truth, const CVector& other) {
  const double denom = angular_bias(other, truth);
  if (!(denom > 1e-12)) fail(ErrorKind::kUndefinedRatio, "true steering vectors coincide");
  return angular_bias(estimate, truth) / denom;
}

double ensemble_coherence(const CVector& estimate, const CVector& truth) {
  if (estimate.size() != truth.size()) fail(ErrorKind::kInvalidInput, "vector lengths differ");
  const Eigen::Index n = estimate.size();
  if (n == 0) fail(ErrorKind::kInvalidInput, "empty vectors");
  cdouble acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i)
    acc += std::polar(1.0, std::arg(truth(i)) - std::arg(estimate(i)));
  return std::min(1.0, std::abs(acc) / static_cast<double>(n));
}

RVector per_baseline_phase_bias(const CVector& estimate, const CVector& truth) {
  if (estimate.size() != truth.size()) fail(ErrorKind::kInvalidInput, "vector lengths differ");
  const Eigen::Index n = estimate.size();
  RVector d(n);
  cdouble resultant{0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i) = std::arg(estimate(i) * std::conj(truth(i))) * kDeg;
    resultant += std::polar(1.0, d(i) / kDeg);
  }
  // Unwrap around the circular mean first so the arithmetic mean is meaningful.
  const double centre = std::arg(resultant) * kDeg;
  for (Eigen::Index i = 0; i < n; ++i) d(i) = wrap_deg(d(i) - centre);
  const double mean = d.mean();
  for (Eigen::Index i = 0; i < n; ++i) d(i) = wrap_deg(d(i) - mean);
  return d;
}

}  // namespace tomobss
