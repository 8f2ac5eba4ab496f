#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tomobss/estimators.hpp"
#include "tomobss/simulator.hpp"

namespace tomobss {

enum class ExperimentKind { kSweepAmplitude, kSweepDistance, kSweepSnr, kSweepKernel, kSingleScene };
enum class EstimatorKind { kPca, kKpcaGaussian, kKpcaPoly };

std::string to_string(ExperimentKind kind);
std::string to_string(EstimatorKind kind);
/// Throws kInvalidInput on unknown names.
ExperimentKind parse_experiment_kind(const std::string& name);
EstimatorKind parse_estimator_kind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSingleScene;
  /// Scene, geometry, looks, noise and seed. Sweeps other than single-scene
  /// need exactly two scatterers; the first one is the reference.
  SimulationConfig base;
  /// Swept values: amplitude ratio, separation in Rayleigh units, M*SNR in
  /// dB, or kernel parameter (beta for Gaussian, order for polynomial).
  std::vector<double> grid;
  /// Secondary axis: sets amplitude[0] = ratio * amplitude[1]. Empty keeps the
  /// scene amplitudes. Ignored by sweep-amplitude.
  std::vector<double> amplitude_ratios;
  /// Noise level as M*SNR in dB; unset keeps base.noise_power. Overridden by
  /// the grid in sweep-snr.
  std::optional<double> msnr_db;
  std::vector<EstimatorKind> estimators{EstimatorKind::kPca, EstimatorKind::kKpcaGaussian};
  std::size_t runs = 200;
  double beta = 5.0;
  double order = 1.3;
  std::optional<double> sigma;  // fixed Gaussian bandwidth instead of beta
  std::size_t kmax = 2;
  double threshold = 0.05;
  bool center = true;
  bool refine = true;
  bool robust = false;
  /// Evaluate once on the model covariance instead of Monte Carlo stacks.
  bool exact_covariance = false;
  std::size_t threads = 0;

  void validate() const;

  /// Simulation protocol defaults for each experiment kind.
  static ExperimentSpec defaults(ExperimentKind kind);
};

struct ResultRow {
  ExperimentKind kind{};
  double grid_value = 0.0;
  double amplitude_ratio = 0.0;
  double separation_rayleigh = 0.0;
  double msnr_db = 0.0;  // +inf when noise-free
  std::size_t looks = 0;
  EstimatorKind estimator{};
  double kernel_param = 0.0;  // NaN for PCA
  std::size_t scatterer = 0;  // 1-based, by descending true intensity
  double true_angle_deg = 0.0;  // angle between the two true vectors, NaN otherwise
  ScattererSummary summary;
  std::size_t runs = 0;
  std::size_t failures = 0;
  bool flagged = false;  // more than half of the runs failed
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ResultRow> rows;
};

/// Rows are in grid order, then amplitude ratio, then estimator, then scatterer.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// The scene a spec evaluates at one grid point and amplitude ratio.
SimulationConfig scene_at(const ExperimentSpec& spec, double grid_value, std::optional<double> ratio);

/// Covariance-level estimator for one estimator kind, with the kernel
/// parameter overridden when `kernel_param` is set.
CovarianceEstimator make_estimator(const ExperimentSpec& spec, EstimatorKind kind,
                                   std::optional<double> kernel_param = std::nullopt);

void write_result_csv(std::ostream& os, const ExperimentResult& result);
std::string spec_to_json(const ExperimentSpec& spec);
/// Writes <stem>.csv and <stem>.json under `dir`, creating it if needed.
void save_experiment(const ExperimentResult& result, const std::filesystem::path& dir, const std::string& stem);

// Per-baseline phase bias of the two leading PCA eigenvectors.
struct PhaseBiasRow {
  std::string covariance;  // "exact" or "sample"
  double alpha = 0.0;      // amplitude ratio
  double baseline_m = 0.0;
  double bias_first_deg = 0.0;
  double bias_second_deg = 0.0;
};

struct PhaseBiasSpec {
  AcquisitionGeometry geometry = AcquisitionGeometry::default_simulation();
  double first_elevation_m = 40.0;
  double second_elevation_m = 80.0;
  std::vector<double> alphas{1.2, 2.0};
  /// Looks for the sample-covariance variant; 0 skips it.
  std::size_t looks = 900;
  std::uint64_t seed = 1;
};

std::vector<PhaseBiasRow> pca_phase_bias_table(const PhaseBiasSpec& spec);

enum class Figure { kPhaseBias, kAmplitude, kDistance, kSnr, kKernel };

std::string figure_file_name(Figure figure);

void write_phase_bias_csv(std::ostream& os, const std::vector<PhaseBiasRow>& rows);
/// Figure-specific column subset of an experiment result. A null or empty
/// result gives a header-only CSV.
void emit_figure_data(std::ostream& os, Figure figure, const ExperimentResult* result);

// Separation of a stored stack or covariance.
struct SeparateFileOptions {
  SeparationOptions separation;
  bool robust = false;
  /// Caps the scatterer count by the eigenvalue MDL order.
  bool use_mdl = true;
  /// Looks assumed for covariance inputs; stacks use their column count.
  std::size_t looks = 100;
  bool refine_peak = false;
  std::optional<std::filesystem::path> geometry_path;
};

/// Returns the result document as JSON text. Input and dimension errors are
/// raised as kInvalidInput or kIo.
std::string run_separation_file(const std::filesystem::path& path, const SeparateFileOptions& options);

}  // namespace tomobss
