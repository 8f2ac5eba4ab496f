#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tomobss/covariance.hpp"
#include "tomobss/error.hpp"
#include "tomobss/experiments.hpp"
#include "tomobss/matrix_io.hpp"
#include "tomobss/scene_io.hpp"

namespace fs = std::filesystem;
using namespace tomobss;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kIo:
    case ErrorKind::kDegenerateGeometry:
      return kExitUsage;
    default:
      return kExitData;
  }
}

// Flags shared by the experiment subcommands.
struct ExperimentFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> looks;
  std::string out = "results";
  std::string kernel;
  std::vector<std::string> estimators;
  std::optional<double> beta;
  std::optional<double> order;
  std::optional<double> sigma;
  std::optional<std::size_t> kmax;
  std::optional<double> threshold;
  std::vector<double> grid;
  std::vector<double> ratios;
  std::optional<double> msnr_db;
  bool robust = false;
  bool no_center = false;
  bool no_refine = false;
  bool exact = false;
  std::optional<std::size_t> threads;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config, "Scene JSON replacing the default base scene")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--runs", f.runs, "Monte Carlo runs per grid point")->check(CLI::PositiveNumber);
  cmd->add_option("--looks", f.looks, "Looks per simulated stack")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--kernel", f.kernel, "Kernel of the proposed estimator")
      ->check(CLI::IsMember({"gaussian", "poly"}));
  cmd->add_option("--estimators", f.estimators, "Estimators: pca, kpca-gaussian, kpca-poly")->delimiter(',');
  cmd->add_option("--beta", f.beta, "Gaussian bandwidth factor");
  cmd->add_option("--order", f.order, "Polynomial kernel order");
  cmd->add_option("--sigma", f.sigma, "Fixed Gaussian bandwidth");
  cmd->add_option("--kmax", f.kmax, "Maximum scatterers per cell")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", f.threshold, "Stop threshold relative to trace/N");
  cmd->add_option("--grid", f.grid, "Swept values, comma separated")->delimiter(',');
  cmd->add_option("--ratios", f.ratios, "Amplitude ratios for the secondary axis")->delimiter(',');
  cmd->add_option("--msnr-db", f.msnr_db, "Noise level as M*SNR in dB");
  cmd->add_flag("--robust", f.robust, "Use the sign covariance matrix");
  cmd->add_flag("--no-center", f.no_center, "Skip kernel centering");
  cmd->add_flag("--no-refine", f.no_refine, "Skip alternating pair refinement");
  cmd->add_flag("--exact", f.exact, "Evaluate on the model covariance instead of Monte Carlo stacks");
  cmd->add_option("--threads", f.threads, "Worker threads (default TOMO_BSS_THREADS or all cores)");
}

ExperimentSpec resolve(ExperimentKind kind, const ExperimentFlags& f) {
  ExperimentSpec s = ExperimentSpec::defaults(kind);
  if (!f.config.empty()) {
    const std::size_t default_looks = s.base.looks;
    s.base = load_config(f.config);
    // The scene file decides looks only when it states them.
    if (read_text_file(f.config).find("\"looks\"") == std::string::npos) s.base.looks = default_looks;
  }
  if (f.seed) s.base.seed = *f.seed;
  if (f.runs) s.runs = *f.runs;
  if (f.looks) s.base.looks = *f.looks;
  if (f.beta) s.beta = *f.beta;
  if (f.order) s.order = *f.order;
  if (f.sigma) s.sigma = *f.sigma;
  if (f.kmax) s.kmax = *f.kmax;
  if (f.threshold) s.threshold = *f.threshold;
  if (!f.grid.empty()) s.grid = f.grid;
  if (!f.ratios.empty()) s.amplitude_ratios = f.ratios;
  if (f.msnr_db) s.msnr_db = *f.msnr_db;
  if (f.threads) s.threads = *f.threads;
  s.robust = f.robust;
  s.center = !f.no_center;
  s.refine = !f.no_refine;
  s.exact_covariance = f.exact;
  if (!f.kernel.empty()) {
    const auto proposed = f.kernel == "poly" ? EstimatorKind::kKpcaPoly : EstimatorKind::kKpcaGaussian;
    if (kind == ExperimentKind::kSweepKernel)
      s.estimators = {proposed};
    else
      s.estimators = {EstimatorKind::kPca, proposed};
  }
  if (!f.estimators.empty()) {
    s.estimators.clear();
    for (const auto& name : f.estimators) s.estimators.push_back(parse_estimator_kind(name));
  }
  if (s.exact_covariance) s.runs = 1;
  return s;
}

int run_sweep(ExperimentKind kind, const ExperimentFlags& f) {
  const ExperimentSpec spec = resolve(kind, f);
  const auto result = run_experiment(spec);
  save_experiment(result, f.out, to_string(kind));
  std::size_t flagged = 0;
  for (const auto& r : result.rows) flagged += r.flagged ? 1 : 0;
  std::cout << "wrote " << (fs::path(f.out) / (to_string(kind) + ".csv")).string() << " (" << result.rows.size()
            << " rows";
  if (flagged) std::cout << ", " << flagged << " flagged";
  std::cout << ")\n";
  return 0;
}

void write_file(const fs::path& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

int run_figure_data(const ExperimentFlags& f) {
  const fs::path out = f.out;
  fs::create_directories(out);

  PhaseBiasSpec phase;
  if (f.seed) phase.seed = *f.seed;
  std::ostringstream fig3;
  write_phase_bias_csv(fig3, pca_phase_bias_table(phase));
  write_file(out / figure_file_name(Figure::kPhaseBias), fig3.str());

  const std::pair<ExperimentKind, Figure> sweeps[] = {
      {ExperimentKind::kSweepAmplitude, Figure::kAmplitude},
      {ExperimentKind::kSweepDistance, Figure::kDistance},
      {ExperimentKind::kSweepSnr, Figure::kSnr},
  };
  for (const auto& [kind, figure] : sweeps) {
    ExperimentFlags g = f;
    g.grid.clear();
    g.ratios.clear();
    const auto result = run_experiment(resolve(kind, g));
    save_experiment(result, out, to_string(kind));
    std::ostringstream csv;
    emit_figure_data(csv, figure, &result);
    write_file(out / figure_file_name(figure), csv.str());
  }

  // Both kernel families share one figure file.
  ExperimentFlags g = f;
  g.grid.clear();
  g.ratios.clear();
  g.kernel.clear();
  g.estimators.clear();
  ExperimentSpec poly = resolve(ExperimentKind::kSweepKernel, g);
  poly.estimators = {EstimatorKind::kKpcaPoly};
  ExperimentSpec gauss = poly;
  gauss.estimators = {EstimatorKind::kKpcaGaussian};
  gauss.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20};
  auto combined = run_experiment(poly);
  const auto second = run_experiment(gauss);
  combined.rows.insert(combined.rows.end(), second.rows.begin(), second.rows.end());
  save_experiment(combined, out, "sweep-kernel");
  std::ostringstream csv;
  emit_figure_data(csv, Figure::kKernel, &combined);
  write_file(out / figure_file_name(Figure::kKernel), csv.str());
  return 0;
}

struct SimulateFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> looks;
  std::optional<double> msnr_db;
  std::string out = "scene";
  bool covariance = false;
};

int run_simulate(const SimulateFlags& f) {
  SimulationConfig c;
  if (f.config.empty())
    c = scene_at(ExperimentSpec::defaults(ExperimentKind::kSingleScene), 0.0, std::nullopt);
  else
    c = load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.looks) c.looks = *f.looks;
  if (f.msnr_db) c.noise_power = noise_for_msnr_db(c, *f.msnr_db);
  c.validate();
  const fs::path out = f.out;
  fs::create_directories(out);
  write_matrix(out / "stack.bin", draw_stack(c).samples());
  std::cout << "wrote " << (out / "stack.bin").string() << "\n";
  if (f.covariance) {
    write_matrix(out / "covariance.bin", c.covariance().matrix());
    std::cout << "wrote " << (out / "covariance.bin").string() << "\n";
  }
  write_file(out / "scene.json", dump_config(c));
  return 0;
}

struct SeparateFlags {
  std::string input;
  std::string geometry;
  std::string kernel = "gaussian";
  double beta = 5.0;
  double order = 1.3;
  std::optional<double> sigma;
  std::size_t kmax = 2;
  double threshold = 0.05;
  std::size_t looks = 100;
  bool robust = false;
  bool no_center = false;
  bool no_refine = false;
  bool refine_peak = false;
  bool no_mdl = false;
  std::string out;
};

int run_separate(const SeparateFlags& f) {
  SeparateFileOptions o;
  if (f.kernel == "poly")
    o.separation.kernel = KernelSpec::polynomial(f.order);
  else if (f.kernel == "linear")
    o.separation.kernel = KernelSpec::linear();
  else if (f.sigma)
    o.separation.kernel = KernelSpec::gaussian_fixed(*f.sigma);
  else
    o.separation.kernel = KernelSpec::gaussian_auto(f.beta);
  o.separation.max_scatterers = f.kmax;
  o.separation.stop_threshold = f.threshold;
  o.separation.center = !f.no_center;
  o.separation.refine_pair = !f.no_refine;
  o.robust = f.robust;
  o.use_mdl = !f.no_mdl;
  o.looks = f.looks;
  o.refine_peak = f.refine_peak;
  if (!f.geometry.empty()) o.geometry_path = f.geometry;
  const std::string doc = run_separation_file(f.input, o);
  if (f.out.empty())
    std::cout << doc;
  else
    write_file(f.out, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layover scatterer separation with kernel PCA"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a Swerling-II stack and write it as a binary matrix");
  simulate->add_option("--config", sim.config, "Scene JSON")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--looks", sim.looks, "Number of looks")->check(CLI::PositiveNumber);
  simulate->add_option("--msnr-db", sim.msnr_db, "Noise level as M*SNR in dB");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_flag("--covariance", sim.covariance, "Also write the model covariance");

  SeparateFlags sep;
  auto* separate = app.add_subcommand("separate", "Separate scatterers in a stack or covariance file");
  separate->add_option("input", sep.input, "Binary matrix file")->required()->check(CLI::ExistingFile);
  separate->add_option("--geometry,--config", sep.geometry, "Geometry or scene JSON")->check(CLI::ExistingFile);
  separate->add_option("--kernel", sep.kernel, "Kernel")->check(CLI::IsMember({"gaussian", "poly", "linear"}));
  separate->add_option("--beta", sep.beta, "Gaussian bandwidth factor")->check(CLI::PositiveNumber);
  separate->add_option("--order", sep.order, "Polynomial order")->check(CLI::PositiveNumber);
  separate->add_option("--sigma", sep.sigma, "Fixed Gaussian bandwidth")->check(CLI::PositiveNumber);
  separate->add_option("--kmax", sep.kmax, "Maximum scatterers")->check(CLI::PositiveNumber);
  separate->add_option("--threshold", sep.threshold, "Stop threshold relative to trace/N");
  separate->add_option("--looks", sep.looks, "Looks behind a covariance input")->check(CLI::PositiveNumber);
  separate->add_flag("--robust", sep.robust, "Use the sign covariance matrix for stacks");
  separate->add_flag("--no-center", sep.no_center, "Skip kernel centering");
  separate->add_flag("--no-refine", sep.no_refine, "Skip alternating pair refinement");
  separate->add_flag("--refine-peak", sep.refine_peak, "Quadratic refinement of periodogram peaks");
  separate->add_flag("--no-mdl", sep.no_mdl, "Do not cap the scatterer count by MDL");
  separate->add_option("--out", sep.out, "Output JSON path (default stdout)");

  const std::pair<const char*, ExperimentKind> sweeps[] = {
      {"sweep-amplitude", ExperimentKind::kSweepAmplitude},
      {"sweep-distance", ExperimentKind::kSweepDistance},
      {"sweep-snr", ExperimentKind::kSweepSnr},
      {"sweep-kernel", ExperimentKind::kSweepKernel},
      {"single-scene", ExperimentKind::kSingleScene},
  };
  std::vector<ExperimentFlags> sweep_flags(std::size(sweeps));
  std::vector<CLI::App*> sweep_cmds;
  for (std::size_t i = 0; i < std::size(sweeps); ++i) {
    auto* cmd = app.add_subcommand(sweeps[i].first, "Run the " + std::string(sweeps[i].first) + " experiment");
    add_experiment_flags(cmd, sweep_flags[i]);
    sweep_cmds.push_back(cmd);
  }

  ExperimentFlags fig;
  fig.out = "figures";
  auto* figures = app.add_subcommand("figure-data", "Run every simulation study and write per-figure CSVs");
  add_experiment_flags(figures, fig);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*separate) return run_separate(sep);
    if (*figures) return run_figure_data(fig);
    for (std::size_t i = 0; i < sweep_cmds.size(); ++i)
      if (*sweep_cmds[i]) return run_sweep(sweeps[i].second, sweep_flags[i]);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
