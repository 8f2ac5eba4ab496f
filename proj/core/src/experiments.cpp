#include "tomobss/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json_detail.hpp"
#include "tomobss/covariance.hpp"
#include "tomobss/error.hpp"
#include "tomobss/estimation.hpp"
#include "tomobss/matrix_io.hpp"
#include "tomobss/scene_io.hpp"

namespace tomobss {

namespace {

using detail::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> range_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return g;
}

double msnr_of(const SimulationConfig& c) {
  if (c.noise_power <= 0.0) return std::numeric_limits<double>::infinity();
  double power = 0.0;
  for (const auto& s : c.scatterers) power += s.intensity();
  const double snr = power / (static_cast<double>(c.geometry.images()) * c.noise_power);
  return 10.0 * std::log10(static_cast<double>(c.looks) * snr);
}

// Stable sort by descending intensity so truth ranks line up with positions.
SimulationConfig ranked(SimulationConfig c) {
  std::stable_sort(c.scatterers.begin(), c.scatterers.end(),
                   [](const ScattererParams& a, const ScattererParams& b) { return a.intensity() > b.intensity(); });
  return c;
}

std::string number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}


}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSweepAmplitude: return "sweep-amplitude";
    case ExperimentKind::kSweepDistance: return "sweep-distance";
    case ExperimentKind::kSweepSnr: return "sweep-snr";
    case ExperimentKind::kSweepKernel: return "sweep-kernel";
    case ExperimentKind::kSingleScene: return "single-scene";
  }
  return "unknown";
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kPca: return "pca";
    case EstimatorKind::kKpcaGaussian: return "kpca-gaussian";
    case EstimatorKind::kKpcaPoly: return "kpca-poly";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::kSweepAmplitude, ExperimentKind::kSweepDistance, ExperimentKind::kSweepSnr,
                 ExperimentKind::kSweepKernel, ExperimentKind::kSingleScene})
    if (to_string(k) == name) return k;
  fail(ErrorKind::kInvalidInput, "unknown experiment kind '" + name + "'");
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  for (auto k : {EstimatorKind::kPca, EstimatorKind::kKpcaGaussian, EstimatorKind::kKpcaPoly})
    if (to_string(k) == name) return k;
  fail(ErrorKind::kInvalidInput, "unknown estimator '" + name + "'");
}

void ExperimentSpec::validate() const {
  base.validate();
  if (grid.empty()) fail(ErrorKind::kInvalidInput, "experiment grid is empty");
  if (runs == 0) fail(ErrorKind::kInvalidInput, "runs must be at least 1");
  if (estimators.empty()) fail(ErrorKind::kInvalidInput, "no estimators selected");
  if (kmax == 0) fail(ErrorKind::kInvalidInput, "kmax must be at least 1");
  if (!(beta > 0.0) || !(order > 0.0)) fail(ErrorKind::kInvalidInput, "kernel parameters must be positive");
  if (sigma && !(*sigma > 0.0)) fail(ErrorKind::kInvalidInput, "sigma must be positive");
  if (!(threshold >= 0.0)) fail(ErrorKind::kInvalidInput, "threshold must be non-negative");
  for (double g : grid)
    if (!std::isfinite(g)) fail(ErrorKind::kInvalidInput, "grid values must be finite");
  for (double r : amplitude_ratios)
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::kInvalidInput, "amplitude ratios must be positive");
  if (kind != ExperimentKind::kSingleScene && base.scatterers.size() != 2)
    fail(ErrorKind::kInvalidInput, to_string(kind) + " needs exactly two scatterers in the base scene");
  if (base.scatterers.empty()) fail(ErrorKind::kInvalidInput, "base scene has no scatterers");
  switch (kind) {
    case ExperimentKind::kSweepAmplitude:
    case ExperimentKind::kSweepKernel:
      for (double g : grid)
        if (!(g > 0.0)) fail(ErrorKind::kInvalidInput, "grid values must be positive for " + to_string(kind));
      break;
    case ExperimentKind::kSweepDistance:
      for (double g : grid)
        if (!(g >= 0.0)) fail(ErrorKind::kInvalidInput, "separations must be non-negative");
      break;
    default: break;
  }
  if (kind == ExperimentKind::kSweepKernel)
    for (auto e : estimators)
      if (e == EstimatorKind::kPca) fail(ErrorKind::kInvalidInput, "sweep-kernel needs kernel estimators");
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.base.looks = 900;
  s.base.seed = 20180101;
  const double rho = rayleigh_resolution(s.base.geometry);
  s.base.scatterers = {{40.0, 1.0, {}}, {40.0 + rho, 1.0, {}}};
  switch (kind) {
    case ExperimentKind::kSweepAmplitude:
      s.grid = range_grid(1.0, 2.0, 0.1);
      break;
    case ExperimentKind::kSweepDistance:
      s.grid = range_grid(0.3, 2.0, 0.1);
      s.amplitude_ratios = {1.0};
      break;
    case ExperimentKind::kSweepSnr:
      s.base.looks = 100;
      s.grid = range_grid(0.0, 40.0, 5.0);
      s.amplitude_ratios = {1.0, 2.0};
      break;
    case ExperimentKind::kSweepKernel:
      s.grid = range_grid(1.0, 3.0, 0.1);
      s.amplitude_ratios = {1.2};
      s.estimators = {EstimatorKind::kKpcaPoly};
      break;
    case ExperimentKind::kSingleScene:
      s.grid = {0.0};
      s.base.scatterers = {{40.0, 2.0, {}}, {80.0, 1.0, {}}};
      break;
  }
  return s;
}

SimulationConfig scene_at(const ExperimentSpec& spec, double grid_value, std::optional<double> ratio) {
  SimulationConfig c = spec.base;
  if (spec.kind == ExperimentKind::kSingleScene) {
    if (spec.msnr_db) c.noise_power = noise_for_msnr_db(c, *spec.msnr_db);
    return c;
  }
  if (c.scatterers.size() != 2) fail(ErrorKind::kInvalidInput, "sweeps need exactly two scatterers");
  auto& first = c.scatterers[0];
  auto& second = c.scatterers[1];
  if (spec.kind == ExperimentKind::kSweepAmplitude)
    first.amplitude = grid_value * second.amplitude;
  else if (ratio)
    first.amplitude = *ratio * second.amplitude;
  if (spec.kind == ExperimentKind::kSweepDistance)
    second.elevation_m = first.elevation_m + grid_value * rayleigh_resolution(c.geometry);
  if (spec.kind == ExperimentKind::kSweepSnr)
    c.noise_power = noise_for_msnr_db(c, grid_value);
  else if (spec.msnr_db)
    c.noise_power = noise_for_msnr_db(c, *spec.msnr_db);
  return c;
}

CovarianceEstimator make_estimator(const ExperimentSpec& spec, EstimatorKind kind,
                                   std::optional<double> kernel_param) {
  const bool dominant_only = spec.kind == ExperimentKind::kSweepKernel;
  if (kind == EstimatorKind::kPca) return pca_estimator(dominant_only ? 1 : spec.kmax);

  KernelSpec kernel = KernelSpec::linear();
  if (kind == EstimatorKind::kKpcaPoly) {
    kernel = KernelSpec::polynomial(kernel_param.value_or(spec.order));
  } else if (spec.sigma) {
    kernel = KernelSpec::gaussian_fixed(kernel_param.value_or(*spec.sigma));
  } else {
    kernel = KernelSpec::gaussian_auto(kernel_param.value_or(spec.beta));
  }
  if (dominant_only) return dominant_estimator(kernel, KpcaOptions{spec.center, SteeringExtraction::kPreImage});

  SeparationOptions options;
  options.kernel = kernel;
  options.max_scatterers = spec.kmax;
  options.stop_threshold = spec.threshold;
  options.center = spec.center;
  options.refine_pair = spec.refine;
  return kpca_estimator(options);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;

  std::vector<std::optional<double>> ratios;
  if (spec.kind == ExperimentKind::kSweepAmplitude || spec.amplitude_ratios.empty())
    ratios.push_back(std::nullopt);
  else
    for (double r : spec.amplitude_ratios) ratios.emplace_back(r);

  const double rho = rayleigh_resolution(spec.base.geometry);
  MonteCarloOptions mc;
  mc.threads = spec.threads;
  const CovarianceKind cov = spec.robust ? CovarianceKind::kSign : CovarianceKind::kSample;

  for (double g : spec.grid) {
    for (const auto& ratio : ratios) {
      const SimulationConfig scene = ranked(scene_at(spec, g, ratio));
      std::size_t tracked = std::min(spec.kmax, scene.scatterers.size());
      if (spec.kind == ExperimentKind::kSweepKernel) tracked = 1;
      auto truth = scene.truth();
      truth.erase(truth.begin() + static_cast<std::ptrdiff_t>(tracked), truth.end());

      double true_angle = kNan;
      if (scene.scatterers.size() == 2) {
        const auto all = scene.truth();
        true_angle = angular_bias(all[0].values(), all[1].values());
      }
      const double amp_ratio = scene.scatterers.size() == 2 && scene.scatterers[1].amplitude > 0.0
                                   ? scene.scatterers[0].amplitude / scene.scatterers[1].amplitude
                                   : kNan;
      const double separation = scene.scatterers.size() == 2
                                    ? std::abs(scene.scatterers[1].elevation_m - scene.scatterers[0].elevation_m) / rho
                                    : kNan;

      for (EstimatorKind e : spec.estimators) {
        std::optional<double> param;
        if (spec.kind == ExperimentKind::kSweepKernel) param = g;
        const auto estimator = make_estimator(spec, e, param);

        MonteCarloSummary summary;
        if (spec.exact_covariance) {
          std::vector<ScattererEstimate> estimates;
          try {
            estimates = estimator(scene.covariance());
          } catch (const Error&) {
            estimates.clear();
          }
          summary = evaluate_once(scene, estimates, truth);
        } else {
          summary = monte_carlo(scene, spec.runs, on_stacks(estimator, cov), truth, mc);
        }

        double kernel_param = kNan;
        if (e == EstimatorKind::kKpcaPoly) kernel_param = param.value_or(spec.order);
        if (e == EstimatorKind::kKpcaGaussian) kernel_param = param.value_or(spec.sigma.value_or(spec.beta));

        for (std::size_t k = 0; k < tracked; ++k) {
          ResultRow row;
          row.kind = spec.kind;
          row.grid_value = g;
          row.amplitude_ratio = amp_ratio;
          row.separation_rayleigh = separation;
          row.msnr_db = msnr_of(scene);
          row.looks = spec.exact_covariance ? 0 : scene.looks;
          row.estimator = e;
          row.kernel_param = kernel_param;
          row.scatterer = k + 1;
          row.true_angle_deg = true_angle;
          row.summary = summary.scatterers[k];
          row.runs = summary.runs;
          row.failures = summary.failures;
          row.flagged = 2 * summary.failures > summary.runs;
          result.rows.push_back(row);
        }
      }
    }
  }
  return result;
}

void write_result_csv(std::ostream& os, const ExperimentResult& result) {
  os << "kind,grid_value,amplitude_ratio,separation_rayleigh,msnr_db,looks,estimator,kernel_param,scatterer,"
        "true_angle_deg,mean_bias_deg,std_bias_deg,mean_relative_bias,mean_coherence,runs,failures,flagged\n";
  for (const auto& r : result.rows) {
    os << to_string(r.kind) << ',' << number(r.grid_value) << ',' << number(r.amplitude_ratio) << ','
       << number(r.separation_rayleigh) << ',' << number(r.msnr_db) << ',' << r.looks << ',' << to_string(r.estimator)
       << ',' << number(r.kernel_param) << ',' << r.scatterer << ',' << number(r.true_angle_deg) << ','
       << number(r.summary.mean_bias_deg) << ',' << number(r.summary.std_bias_deg) << ','
       << number(r.summary.mean_relative_bias) << ',' << number(r.summary.mean_coherence) << ',' << r.runs << ','
       << r.failures << ',' << (r.flagged ? 1 : 0) << '\n';
  }
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json estimators = json::array();
  for (auto e : spec.estimators) estimators.push_back(to_string(e));
  json j{{"kind", to_string(spec.kind)},
         {"base", detail::to_json(spec.base)},
         {"grid", spec.grid},
         {"amplitude_ratios", spec.amplitude_ratios},
         {"msnr_db", spec.msnr_db ? json(*spec.msnr_db) : json(nullptr)},
         {"estimators", estimators},
         {"runs", spec.runs},
         {"beta", spec.beta},
         {"order", spec.order},
         {"sigma", spec.sigma ? json(*spec.sigma) : json(nullptr)},
         {"kmax", spec.kmax},
         {"threshold", spec.threshold},
         {"center", spec.center},
         {"refine", spec.refine},
         {"robust", spec.robust},
         {"exact_covariance", spec.exact_covariance},
         {"rayleigh_resolution_m", rayleigh_resolution(spec.base.geometry)}};
  return j.dump(2) + "\n";
}

void save_experiment(const ExperimentResult& result, const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream csv;
  write_result_csv(csv, result);
  write_text_file(dir / (stem + ".csv"), csv.str());
  write_text_file(dir / (stem + ".json"), spec_to_json(result.spec));
}

std::vector<PhaseBiasRow> pca_phase_bias_table(const PhaseBiasSpec& spec) {
  std::vector<PhaseBiasRow> rows;
  const auto& geom = spec.geometry;
  const CVector r1 = steering_vector(geom, spec.first_elevation_m).values();
  const CVector r2 = steering_vector(geom, spec.second_elevation_m).values();

  auto add = [&](const std::string& label, double alpha, const HermitianMatrix& c) {
    const auto eig = pca_components(c);
    const RVector b1 = per_baseline_phase_bias(eig.vectors.col(0), r1);
    const RVector b2 = per_baseline_phase_bias(eig.vectors.col(1), r2);
    for (std::size_t n = 0; n < geom.images(); ++n) {
      const auto i = static_cast<Eigen::Index>(n);
      rows.push_back({label, alpha, geom.baselines()[n], b1(i), b2(i)});
    }
  };

  for (double alpha : spec.alphas) {
    SimulationConfig c;
    c.geometry = geom;
    c.scatterers = {{spec.first_elevation_m, alpha, {}}, {spec.second_elevation_m, 1.0, {}}};
    c.looks = spec.looks;
    c.seed = spec.seed;
    add("exact", alpha, c.covariance());
    if (spec.looks > 0) add("sample", alpha, sample_covariance(draw_stack(c)));
  }
  return rows;
}

std::string figure_file_name(Figure figure) {
  switch (figure) {
    case Figure::kPhaseBias: return "fig3_pca_phase_bias.csv";
    case Figure::kAmplitude: return "fig5_bias_vs_amplitude_ratio.csv";
    case Figure::kDistance: return "fig6_bias_vs_distance.csv";
    case Figure::kSnr: return "fig7_bias_vs_msnr.csv";
    case Figure::kKernel: return "fig9_coherence_vs_kernel_parameter.csv";
  }
  return "figure.csv";
}

void write_phase_bias_csv(std::ostream& os, const std::vector<PhaseBiasRow>& rows) {
  os << "covariance,alpha,baseline_m,bias_first_deg,bias_second_deg\n";
  for (const auto& r : rows)
    os << r.covariance << ',' << number(r.alpha) << ',' << number(r.baseline_m) << ',' << number(r.bias_first_deg)
       << ',' << number(r.bias_second_deg) << '\n';
}

void emit_figure_data(std::ostream& os, Figure figure, const ExperimentResult* result) {
  ExperimentKind want{};
  switch (figure) {
    case Figure::kPhaseBias:
      write_phase_bias_csv(os, {});
      return;
    case Figure::kAmplitude:
      want = ExperimentKind::kSweepAmplitude;
      os << "amplitude_ratio,separation_rayleigh,estimator,kernel_param,scatterer,mean_bias_deg,std_bias_deg,runs,"
            "failures,flagged\n";
      break;
    case Figure::kDistance:
      want = ExperimentKind::kSweepDistance;
      os << "separation_rayleigh,amplitude_ratio,estimator,kernel_param,scatterer,true_angle_deg,mean_bias_deg,"
            "std_bias_deg,mean_relative_bias,runs,failures,flagged\n";
      break;
    case Figure::kSnr:
      want = ExperimentKind::kSweepSnr;
      os << "msnr_db,amplitude_ratio,looks,estimator,kernel_param,scatterer,mean_bias_deg,std_bias_deg,runs,failures,"
            "flagged\n";
      break;
    case Figure::kKernel:
      want = ExperimentKind::kSweepKernel;
      os << "estimator,kernel_param,amplitude_ratio,separation_rayleigh,mean_coherence,mean_bias_deg,runs,failures,"
            "flagged\n";
      break;
  }
  if (!result) return;
  for (const auto& r : result->rows) {
    if (r.kind != want) continue;
    const auto& s = r.summary;
    const int flag = r.flagged ? 1 : 0;
    switch (figure) {
      case Figure::kAmplitude:
        os << number(r.amplitude_ratio) << ',' << number(r.separation_rayleigh) << ',' << to_string(r.estimator) << ','
           << number(r.kernel_param) << ',' << r.scatterer << ',' << number(s.mean_bias_deg) << ','
           << number(s.std_bias_deg) << ',' << r.runs << ',' << r.failures << ',' << flag << '\n';
        break;
      case Figure::kDistance:
        os << number(r.separation_rayleigh) << ',' << number(r.amplitude_ratio) << ',' << to_string(r.estimator) << ','
           << number(r.kernel_param) << ',' << r.scatterer << ',' << number(r.true_angle_deg) << ','
           << number(s.mean_bias_deg) << ',' << number(s.std_bias_deg) << ',' << number(s.mean_relative_bias) << ','
           << r.runs << ',' << r.failures << ',' << flag << '\n';
        break;
      case Figure::kSnr:
        os << number(r.msnr_db) << ',' << number(r.amplitude_ratio) << ',' << r.looks << ',' << to_string(r.estimator)
           << ',' << number(r.kernel_param) << ',' << r.scatterer << ',' << number(s.mean_bias_deg) << ','
           << number(s.std_bias_deg) << ',' << r.runs << ',' << r.failures << ',' << flag << '\n';
        break;
      case Figure::kKernel:
        os << to_string(r.estimator) << ',' << number(r.kernel_param) << ',' << number(r.amplitude_ratio) << ','
           << number(r.separation_rayleigh) << ',' << number(s.mean_coherence) << ',' << number(s.mean_bias_deg) << ','
           << r.runs << ',' << r.failures << ',' << flag << '\n';
        break;
      case Figure::kPhaseBias: break;
    }
  }
}

std::string run_separation_file(const std::filesystem::path& path, const SeparateFileOptions& options) {
  const CMatrix data = read_matrix(path);
  const AcquisitionGeometry geom =
      options.geometry_path ? load_geometry(*options.geometry_path) : AcquisitionGeometry::default_simulation();
  if (static_cast<std::size_t>(data.rows()) != geom.images())
    fail(ErrorKind::kInvalidInput, "matrix has " + std::to_string(data.rows()) + " rows but the geometry has " +
                                       std::to_string(geom.images()) + " images");

  // A square Hermitian input is read as a covariance, anything else as a stack.
  const bool square = data.rows() == data.cols();
  const bool hermitian = square && (data - data.adjoint()).norm() <= 1e-10 * std::max(1.0, data.norm());
  HermitianMatrix c;
  std::size_t looks = options.looks;
  std::string estimator = "none";
  if (hermitian) {
    c = HermitianMatrix::checked(data, 1e-10);
  } else {
    const ObservationStack stack(data);
    c = estimate_covariance(stack, options.robust ? CovarianceKind::kSign : CovarianceKind::kSample);
    looks = static_cast<std::size_t>(data.cols());
    estimator = options.robust ? "sign" : "sample";
  }

  SeparationOptions sep = options.separation;
  const std::size_t order = estimate_model_order(c, looks, sep.max_scatterers);
  if (options.use_mdl) sep.max_scatterers = order;

  json out;
  out["input"] = {{"path", path.string()},
                  {"kind", hermitian ? "covariance" : "stack"},
                  {"rows", data.rows()},
                  {"cols", data.cols()}};
  out["covariance_estimator"] = estimator;
  out["looks"] = looks;
  out["kernel"] = sep.kernel.describe();
  out["model_order"] = order;
  out["max_scatterers"] = sep.max_scatterers;

  json estimates = json::array();
  json diagnostics;
  if (sep.max_scatterers == 0) {
    out["residual_trace"] = c.trace();
    out["iterations"] = 0;
    diagnostics = {{"no_signal", true}, {"message", "model order selection found no scatterer"}};
  } else {
    const SeparationResult result = separate_scatterers(c, sep);
    PeriodogramOptions popt;
    popt.refine_peak = options.refine_peak;
    const auto grid = PeriodogramGrid::default_for(geom);
    for (const auto& e : result.estimates) {
      json item{{"intensity", e.intensity}};
      try {
        const auto peak = periodogram(e.steering, geom, grid, popt);
        item["elevation_m"] = peak.elevation;
        item["peak_coherence"] = peak.peak_coherence;
      } catch (const Error& err) {
        item["elevation_m"] = nullptr;
        item["peak_coherence"] = nullptr;
        item["periodogram_error"] = err.what();
      }
      std::vector<double> phase;
      for (Eigen::Index i = 0; i < e.steering.size(); ++i) phase.push_back(std::arg(e.steering(i)));
      item["phase_rad"] = phase;
      estimates.push_back(item);
    }
    out["residual_trace"] = result.residual.trace();
    out["iterations"] = result.iterations;
    const auto& d = result.diagnostics;
    diagnostics = {{"no_signal", d.no_signal},
                   {"message", d.message},
                   {"rejected_below_threshold", d.rejected_below_threshold},
                   {"branch_cut_hits", d.branch_cut_hits},
                   {"negative_residual", d.negative_residual},
                   {"refined", d.refined},
                   {"refine_converged", d.refine_converged},
                   {"refine_iterations", d.refine_iterations}};
  }
  out["estimates"] = estimates;
  out["diagnostics"] = diagnostics;
  return out.dump(2) + "\n";
}

}  // namespace tomobss
