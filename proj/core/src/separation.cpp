#include "tomobss/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tomobss/covariance.hpp"
#include "tomobss/error.hpp"

namespace tomobss {

namespace {

double angle_deg(const CVector& a, const CVector& b) {
  const CVector u = a / a.norm();
  CVector w = b / b.norm();
  const cdouble p = u.dot(w);
  if (std::abs(p) > 0.0) w *= std::conj(p) / std::abs(p);
  return 2.0 * std::atan2((u - w).norm(), (u + w).norm()) * 180.0 / std::numbers::pi;
}

Eigen::Index largest_modulus_index(const CVector& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Near-ties resolve to the lowest index so the output stays deterministic.
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

HermitianMatrix subtract_rank_one(const HermitianMatrix& c, const CVector& unit, double intensity) {
  CMatrix m = c.matrix();
  m.noalias() -= intensity * unit * unit.adjoint();
  return HermitianMatrix::symmetrized(std::move(m));
}

}  // namespace

EigenDecomposition pca_components(const HermitianMatrix& c) {
  const Eigen::Index n = c.size();
  if (n == 0) fail(ErrorKind::kInvalidInput, "empty covariance matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c.matrix());
  if (es.info() != Eigen::Success) fail(ErrorKind::kInvalidInput, "eigendecomposition failed");
  EigenDecomposition out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < n; ++k) {
    auto col = out.vectors.col(k);
    const cdouble pivot = col(largest_modulus_index(col));
    col *= std::abs(pivot) / pivot;
    col.normalize();
  }
  return out;
}

CVector amplitude_drop(const CVector& v) {
  const Eigen::Index n = v.size();
  if (n == 0) fail(ErrorKind::kInvalidInput, "empty vector");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double ref = std::arg(v(0));
  CVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = std::polar(scale, std::arg(v(i)) - ref);
  return out;
}

DominantComponent kpca_dominant(const HermitianMatrix& c, const KernelSpec& kernel,
                                const KpcaOptions& options) {
  if (options.extraction == SteeringExtraction::kProjection && kernel.kind() == KernelKind::kGaussian)
    fail(ErrorKind::kInvalidInput,
         "projection extraction needs a complex kernel; the Gaussian kernel matrix is real");
  const Eigen::Index n = c.size();
  if (n < 2) fail(ErrorKind::kInvalidInput, "kernel PCA needs at least two images");

  const KernelMatrix km = kernel_matrix(c, kernel);
  const double scale = std::abs(km.matrix.trace());
  const HermitianMatrix k = options.center ? center_kernel(km.matrix) : km.matrix;

  Eigen::SelfAdjointEigenSolver<CMatrix> es(k.matrix());
  if (es.info() != Eigen::Success) fail(ErrorKind::kNoSignal, "kernel eigendecomposition failed");
  const double s1 = es.eigenvalues()(n - 1);
  if (!(s1 > 1e-12 * scale) || !(s1 > 0.0))
    fail(ErrorKind::kNoSignal, "kernel matrix has no dominant component");

  DominantComponent out;
  out.weights = es.eigenvectors().col(n - 1);
  out.eigenvalue = s1;
  out.bandwidth = km.bandwidth;
  out.branch_cut_hits = km.branch_cut_hits;

  CVector y;
  if (options.extraction == SteeringExtraction::kPreImage) {
    y = c.matrix() * out.weights / std::sqrt(s1);
    if (!(y.norm() > 1e-13 * c.frobenius_norm() / std::sqrt(s1)))
      fail(ErrorKind::kNoSignal, "dominant component has no pre-image in the data span");
  } else {
    y = k.matrix() * out.weights / std::sqrt(s1);
  }
  out.steering = amplitude_drop(y);
  return out;
}

double rayleigh_intensity(const HermitianMatrix& c, const CVector& y) {
  if (y.size() != c.size()) fail(ErrorKind::kInvalidInput, "vector and matrix sizes differ");
  if (!(y.norm() > 0.0)) fail(ErrorKind::kInvalidInput, "zero steering estimate");
  const auto n = static_cast<double>(y.size());
  // Unit-modulus phase vector as in the Rayleigh quotient; ybar^H ybar = N.
  const CVector ybar = amplitude_drop(y) * std::sqrt(n);
  const double quotient = (ybar.dot(c.matrix() * ybar)).real() / ybar.squaredNorm() / n;
  return std::max(0.0, n * quotient);
}

Deflation deflate(const HermitianMatrix& c, const CVector& y, double intensity) {
  if (y.size() != c.size()) fail(ErrorKind::kInvalidInput, "vector and matrix sizes differ");
  Deflation out{subtract_rank_one(c, amplitude_drop(y), intensity), false};
  const double min_eig = out.residual.eigenvalues()(0);
  out.strongly_negative = min_eig < -0.1 * c.trace();
  return out;
}

PairIntensities reestimate_two(const HermitianMatrix& c, const CVector& first, const CVector& second,
                               std::size_t max_iters, double tol) {
  const CVector r1 = amplitude_drop(first);
  const CVector r2 = amplitude_drop(second);
  PairIntensities out;
  out.first = rayleigh_intensity(c, r1);
  out.second = rayleigh_intensity(c, r2);
  const bool coincident = std::abs(r1.dot(r2)) > 1.0 - 1e-9;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const double s1 = rayleigh_intensity(subtract_rank_one(c, r2, out.second), r1);
    const double s2 = rayleigh_intensity(subtract_rank_one(c, r1, s1), r2);
    const double change = std::max(std::abs(s1 - out.first), std::abs(s2 - out.second));
    out.first = s1;
    out.second = s2;
    out.iterations = it;
    if (change <= tol * std::max(1.0, std::abs(c.trace()))) {
      out.converged = !coincident;
      break;
    }
  }
  return out;
}

PairRefinement refine_pair(const HermitianMatrix& c, const ScattererEstimate& first,
                           const ScattererEstimate& second, const KernelSpec& kernel,
                           const KpcaOptions& options, std::size_t max_iters, double tol_deg) {
  PairRefinement out{{amplitude_drop(first.steering), first.intensity},
                     {amplitude_drop(second.steering), second.intensity},
                     0,
                     false};
  try {
    for (std::size_t it = 1; it <= max_iters; ++it) {
      const HermitianMatrix r1 = subtract_rank_one(c, out.second.steering, out.second.intensity);
      const CVector y1 = kpca_dominant(r1, kernel, options).steering;
      const double s1 = rayleigh_intensity(r1, y1);

      const HermitianMatrix r2 = subtract_rank_one(c, y1, s1);
      const CVector y2 = kpca_dominant(r2, kernel, options).steering;
      const double s2 = rayleigh_intensity(r2, y2);

      const double moved = std::max(angle_deg(y1, out.first.steering), angle_deg(y2, out.second.steering));
      out.first = {y1, s1};
      out.second = {y2, s2};
      out.iterations = it;
      if (moved < tol_deg) {
        out.converged = true;
        break;
      }
    }
  } catch (const Error&) {
    // One side ran out of signal; keep the last complete iterate.
    out.converged = false;
  }
  return out;
}

SeparationResult separate_scatterers(const HermitianMatrix& c, const SeparationOptions& options) {
  if (options.max_scatterers < 1) fail(ErrorKind::kInvalidInput, "max_scatterers must be at least 1");
  if (!(options.stop_threshold >= 0.0)) fail(ErrorKind::kInvalidInput, "stop threshold must be >= 0");

  const KpcaOptions kpca{options.center, options.extraction};
  const double floor = options.stop_threshold * c.trace() / static_cast<double>(c.size());

  SeparationResult result;
  HermitianMatrix work = c;
  for (std::size_t k = 0; k < options.max_scatterers; ++k) {
    DominantComponent dom;
    try {
      ++result.iterations;
      dom = kpca_dominant(work, options.kernel, kpca);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNoSignal && e.kind() != ErrorKind::kDegenerateInput) throw;
      if (k == 0) {
        result.diagnostics.no_signal = true;
        result.diagnostics.message = e.what();
      }
      break;
    }
    result.diagnostics.branch_cut_hits += dom.branch_cut_hits;
    const double intensity = rayleigh_intensity(work, dom.steering);
    if (intensity < floor || intensity <= 0.0) {
      ++result.diagnostics.rejected_below_threshold;
      if (k == 0) {
        result.diagnostics.no_signal = true;
        result.diagnostics.message = "first component is below the stop threshold";
      }
      break;
    }
    result.estimates.push_back({dom.steering, intensity});
    Deflation d = deflate(work, dom.steering, intensity);
    result.diagnostics.negative_residual |= d.strongly_negative;
    work = std::move(d.residual);
  }

  if (result.estimates.size() == 2) {
    auto& e = result.estimates;
    if (options.refine_pair) {
      const PairRefinement r = refine_pair(c, e[0], e[1], options.kernel, kpca,
                                           options.refine_max_iters, options.refine_tol_deg);
      result.diagnostics.refined = true;
      result.diagnostics.refine_converged = r.converged;
      result.diagnostics.refine_iterations = r.iterations;
      if (r.iterations > 0) {
        e[0] = r.first;
        e[1] = r.second;
      }
    } else if (options.reestimate_intensities) {
      const PairIntensities p = reestimate_two(c, e[0].steering, e[1].steering);
      e[0].intensity = p.first;
      e[1].intensity = p.second;
    }
  }

  std::stable_sort(result.estimates.begin(), result.estimates.end(),
                   [](const ScattererEstimate& a, const ScattererEstimate& b) {
                     return a.intensity > b.intensity;
                   });

  CMatrix residual = c.matrix();
  for (const auto& e : result.estimates) residual.noalias() -= e.intensity * e.steering * e.steering.adjoint();
  result.residual = HermitianMatrix::symmetrized(std::move(residual));
  return result;
}

std::size_t estimate_model_order(const HermitianMatrix& c, std::size_t looks, std::size_t max_order) {
  if (looks < 1) fail(ErrorKind::kInvalidInput, "model order selection needs at least one look");
  const Eigen::Index n = c.size();
  const double trace = c.trace();
  if (!(trace > 0.0)) return 0;
  RVector ev = c.eigenvalues().reverse();
  const double floor = 1e-15 * trace;
  for (Eigen::Index i = 0; i < n; ++i) ev(i) = std::max(ev(i), floor);

  const double m = static_cast<double>(looks);
  const double log_m = std::log(m);
  std::size_t best = 0;
  double best_mdl = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index tail = n - k;
    const auto noise = ev.tail(tail);
    const double log_geo = noise.array().log().mean();
    const double log_arith = std::log(noise.mean());
    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    const double mdl = -m * static_cast<double>(tail) * (log_geo - log_arith) +
                       0.5 * kd * (2.0 * nd - kd) * log_m;
    if (k == 0 || mdl < best_mdl - 1e-12 * std::abs(best_mdl)) {
      best_mdl = mdl;
      best = static_cast<std::size_t>(k);
    }
  }
  return std::min(best, max_order);
}

}  // namespace tomobss
