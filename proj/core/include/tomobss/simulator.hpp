#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "tomobss/geometry.hpp"
#include "tomobss/separation.hpp"
#include "tomobss/types.hpp"

namespace tomobss {

struct SimulationConfig {
  AcquisitionGeometry geometry = AcquisitionGeometry::default_simulation();
  std::vector<ScattererParams> scatterers;
  double noise_power = 0.0;
  std::size_t looks = 900;
  std::uint64_t seed = 0;

  /// Throws kInvalidInput for M = 0, negative or non-finite powers, or
  /// deformation bases that do not match the geometry.
  void validate() const;

  std::vector<SteeringVector> truth() const;
  HermitianMatrix covariance() const;
};

/// Swerling-II stack: column m is sum_k gamma_km r_k + eps_m, so that the
/// expected sample covariance is the model covariance.
ObservationStack draw_stack(const SimulationConfig& config);

/// Per-run seed: base XOR run index, passed through a 64-bit finalizer.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run);

/// Noise power giving the requested M*SNR (dB), with
/// SNR = sum sigma_k^2 / (N sigma_eps^2).
double noise_for_msnr_db(const SimulationConfig& config, double msnr_db);

using Estimator = std::function<std::vector<ScattererEstimate>(const ObservationStack&)>;

struct ScattererSummary {
  double mean_bias_deg = 0.0;
  double std_bias_deg = 0.0;
  double mean_relative_bias = 0.0;  // NaN when there is no second truth vector
  double mean_coherence = 0.0;
};

struct MonteCarloSummary {
  std::vector<ScattererSummary> scatterers;  // in descending true intensity
  std::size_t runs = 0;
  std::size_t failures = 0;
  /// bias[run][k] in degrees; empty rows for failed runs.
  std::vector<std::vector<double>> bias;
};

struct MonteCarloOptions {
  /// 0 picks TOMO_BSS_THREADS or the hardware concurrency.
  std::size_t threads = 0;
};

std::size_t worker_threads(std::size_t requested = 0);

/// Runs the estimator on `runs` fresh stacks. Estimates are ranked by
/// intensity and paired with truths ranked by nominal intensity; among truths
/// of equal intensity the pairing minimizing total angular bias is used.
/// Estimator errors and short estimate lists count as failures.
MonteCarloSummary monte_carlo(const SimulationConfig& config, std::size_t runs,
                              const Estimator& estimator, const std::vector<SteeringVector>& truth,
                              const MonteCarloOptions& options = {});

/// Same, with truth taken from config.scatterers.
MonteCarloSummary monte_carlo(const SimulationConfig& config, std::size_t runs,
                              const Estimator& estimator, const MonteCarloOptions& options = {});

/// Scores one estimate list against the truth with the monte_carlo rules,
/// as a single-run summary.
MonteCarloSummary evaluate_once(const SimulationConfig& config, const std::vector<ScattererEstimate>& estimates,
                                const std::vector<SteeringVector>& truth);

struct Match {
  std::size_t estimate = 0;
  std::size_t truth = 0;
};

/// Pairs estimates with truths as monte_carlo does, one entry per truth rank.
/// Equal estimated intensities are ordered by lower periodogram elevation.
std::vector<Match> match_estimates(const std::vector<ScattererEstimate>& estimates,
                                   const std::vector<CVector>& truth,
                                   const std::vector<double>& truth_intensity,
                                   const AcquisitionGeometry& geom);

}  // namespace tomobss
