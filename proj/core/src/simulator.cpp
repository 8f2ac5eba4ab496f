#include "tomobss/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "tomobss/error.hpp"
#include "tomobss/estimation.hpp"

namespace tomobss {

void SimulationConfig::validate() const {
  if (looks == 0) fail(ErrorKind::kInvalidInput, "looks must be at least 1");
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
    fail(ErrorKind::kInvalidInput, "noise power must be finite and non-negative");
  for (const auto& s : scatterers) {
    if (!std::isfinite(s.elevation_m) || !std::isfinite(s.amplitude) || s.amplitude < 0.0)
      fail(ErrorKind::kInvalidInput, "scatterer needs finite elevation and non-negative amplitude");
    for (const auto& d : s.deformation)
      if (d.basis.size() != geometry.images())
        fail(ErrorKind::kInvalidInput, "deformation basis needs one value per image");
  }
}

std::vector<SteeringVector> SimulationConfig::truth() const {
  std::vector<SteeringVector> out;
  out.reserve(scatterers.size());
  for (const auto& s : scatterers) out.push_back(steering_vector(geometry, s));
  return out;
}

HermitianMatrix SimulationConfig::covariance() const {
  return model_covariance(geometry, scatterers, noise_power);
}

ObservationStack draw_stack(const SimulationConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.geometry.images());
  const auto m = static_cast<Eigen::Index>(config.looks);
  const auto truth = config.truth();

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  auto cn = [&](double power) {
    const double x = normal(rng);
    const double y = normal(rng);
    return cdouble(x, y) * std::sqrt(power / 2.0);
  };

  CMatrix g = CMatrix::Zero(n, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    for (std::size_t k = 0; k < truth.size(); ++k)
      g.col(col) += cn(config.scatterers[k].intensity()) * truth[k].values();
    if (config.noise_power > 0.0)
      for (Eigen::Index i = 0; i < n; ++i) g(i, col) += cn(config.noise_power);
  }
  return ObservationStack(std::move(g));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run) {
  std::uint64_t z = base ^ run;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double noise_for_msnr_db(const SimulationConfig& config, double msnr_db) {
  double power = 0.0;
  for (const auto& s : config.scatterers) power += s.intensity();
  if (!(power > 0.0)) fail(ErrorKind::kInvalidInput, "SNR needs at least one scatterer with power");
  const double snr = std::pow(10.0, msnr_db / 10.0) / static_cast<double>(config.looks);
  return power / (static_cast<double>(config.geometry.images()) * snr);
}

std::size_t worker_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TOMO_BSS_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Match> match_estimates(const std::vector<ScattererEstimate>& estimates,
                                   const std::vector<CVector>& truth,
                                   const std::vector<double>& truth_intensity,
                                   const AcquisitionGeometry& geom) {
  const std::size_t t = truth.size();
  if (truth_intensity.size() != t) fail(ErrorKind::kInvalidInput, "one intensity per truth vector required");
  if (estimates.size() < t) fail(ErrorKind::kInvalidInput, "fewer estimates than truth vectors");

  std::vector<std::size_t> est(estimates.size());
  std::iota(est.begin(), est.end(), 0);
  std::vector<double> elevation(estimates.size(), std::numeric_limits<double>::quiet_NaN());
  auto elevation_of = [&](std::size_t i) {
    if (std::isnan(elevation[i])) {
      try {
        elevation[i] = periodogram(estimates[i].steering, geom, PeriodogramGrid::default_for(geom)).elevation;
      } catch (const Error&) {
        elevation[i] = std::numeric_limits<double>::infinity();
      }
    }
    return elevation[i];
  };
  std::stable_sort(est.begin(), est.end(), [&](std::size_t a, std::size_t b) {
    if (estimates[a].intensity != estimates[b].intensity) return estimates[a].intensity > estimates[b].intensity;
    return elevation_of(a) < elevation_of(b);
  });

  std::vector<std::size_t> tru(t);
  std::iota(tru.begin(), tru.end(), 0);
  std::stable_sort(tru.begin(), tru.end(),
                   [&](std::size_t a, std::size_t b) { return truth_intensity[a] > truth_intensity[b]; });

  std::vector<Match> out(t);
  for (std::size_t k = 0; k < t; ++k) out[k] = Match{est[k], tru[k]};

  // Within a group of equal nominal intensities the ranking carries no
  // information, so pick the assignment with the smallest total bias.
  std::size_t begin = 0;
  while (begin < t) {
    std::size_t end = begin + 1;
    const double ref = truth_intensity[tru[begin]];
    while (end < t && std::abs(truth_intensity[tru[end]] - ref) <= 1e-12 * std::max(1.0, std::abs(ref))) ++end;
    if (end - begin > 1 && end - begin <= 8) {
      std::vector<std::size_t> perm(tru.begin() + static_cast<std::ptrdiff_t>(begin),
                                    tru.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(perm.begin(), perm.end());
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> best_perm = perm;
      do {
        double total = 0.0;
        for (std::size_t j = 0; j < perm.size(); ++j)
          total += angular_bias(estimates[est[begin + j]].steering, truth[perm[j]]);
        if (total < best - 1e-12) {
          best = total;
          best_perm = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      for (std::size_t j = 0; j < best_perm.size(); ++j) out[begin + j].truth = best_perm[j];
    }
    begin = end;
  }
  return out;
}

namespace {

struct RunOutcome {
  bool failed = false;
  std::vector<double> bias;
  std::vector<double> relative;
  std::vector<double> coherence;
};

RunOutcome score(const std::vector<ScattererEstimate>& estimates, const std::vector<CVector>& truth,
                 const std::vector<double>& truth_intensity, const AcquisitionGeometry& geom) {
  const std::size_t t = truth.size();
  const auto matches = match_estimates(estimates, truth, truth_intensity, geom);
  RunOutcome o;
  o.bias.resize(t);
  o.relative.resize(t);
  o.coherence.resize(t);
  for (std::size_t k = 0; k < t; ++k) {
    const CVector& y = estimates[matches[k].estimate].steering;
    const CVector& r0 = truth[matches[k].truth];
    o.bias[k] = angular_bias(y, r0);
    o.coherence[k] = ensemble_coherence(y, r0);
    // Relative to the nearest other true vector.
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < t; ++j)
      if (j != matches[k].truth) nearest = std::min(nearest, angular_bias(truth[j], r0));
    o.relative[k] = std::isfinite(nearest) && nearest > 1e-12 ? o.bias[k] / nearest
                                                               : std::numeric_limits<double>::quiet_NaN();
  }
  return o;
}

void split_truth(const SimulationConfig& config, const std::vector<SteeringVector>& truth,
                 std::vector<CVector>& vectors, std::vector<double>& intensity) {
  for (std::size_t k = 0; k < truth.size(); ++k) {
    vectors.push_back(truth[k].values());
    // Truth vectors are paired with the config's scatterers by position.
    intensity.push_back(k < config.scatterers.size() ? config.scatterers[k].intensity() : 0.0);
  }
}

MonteCarloSummary reduce(const std::vector<RunOutcome>& outcomes, std::size_t t) {
  MonteCarloSummary s;
  s.runs = outcomes.size();
  s.scatterers.resize(t);
  s.bias.resize(outcomes.size());
  std::vector<double> sum(t, 0.0), rel(t, 0.0), coh(t, 0.0);
  std::size_t ok = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const auto& o = outcomes[r];
    if (o.failed) {
      ++s.failures;
      continue;
    }
    ++ok;
    s.bias[r] = o.bias;
    for (std::size_t k = 0; k < t; ++k) {
      sum[k] += o.bias[k];
      rel[k] += o.relative[k];
      coh[k] += o.coherence[k];
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < t; ++k) {
    auto& out = s.scatterers[k];
    if (ok == 0) {
      out = {nan, nan, nan, nan};
      continue;
    }
    const double n = static_cast<double>(ok);
    out.mean_bias_deg = sum[k] / n;
    double ss = 0.0;
    for (const auto& o : outcomes)
      if (!o.failed) ss += (o.bias[k] - out.mean_bias_deg) * (o.bias[k] - out.mean_bias_deg);
    out.std_bias_deg = ok > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.mean_relative_bias = rel[k] / n;
    out.mean_coherence = coh[k] / n;
  }
  return s;
}

}  // namespace

MonteCarloSummary monte_carlo(const SimulationConfig& config, std::size_t runs,
                              const Estimator& estimator, const std::vector<SteeringVector>& truth,
                              const MonteCarloOptions& options) {
  if (runs == 0) fail(ErrorKind::kInvalidInput, "runs must be at least 1");
  if (truth.empty()) fail(ErrorKind::kInvalidInput, "monte carlo needs at least one truth vector");
  config.validate();

  const std::size_t t = truth.size();
  std::vector<CVector> truth_v;
  std::vector<double> truth_i;
  split_truth(config, truth, truth_v, truth_i);

  std::vector<RunOutcome> outcomes(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto work = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      RunOutcome& o = outcomes[r];
      try {
        SimulationConfig c = config;
        c.seed = derive_seed(config.seed, r);
        const auto estimates = estimator(draw_stack(c));
        if (estimates.size() < t)
          o.failed = true;
        else
          o = score(estimates, truth_v, truth_i, config.geometry);
      } catch (const Error&) {
        o = RunOutcome{};
        o.failed = true;
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = runs;
      }
    }
  };

  const std::size_t threads = std::min(worker_threads(options.threads), runs);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
  }
  if (fatal) std::rethrow_exception(fatal);
  return reduce(outcomes, t);
}

MonteCarloSummary monte_carlo(const SimulationConfig& config, std::size_t runs,
                              const Estimator& estimator, const MonteCarloOptions& options) {
  return monte_carlo(config, runs, estimator, config.truth(), options);
}

MonteCarloSummary evaluate_once(const SimulationConfig& config, const std::vector<ScattererEstimate>& estimates,
                                const std::vector<SteeringVector>& truth) {
  if (truth.empty()) fail(ErrorKind::kInvalidInput, "evaluation needs at least one truth vector");
  std::vector<CVector> truth_v;
  std::vector<double> truth_i;
  split_truth(config, truth, truth_v, truth_i);
  std::vector<RunOutcome> outcomes(1);
  if (estimates.size() < truth.size())
    outcomes[0].failed = true;
  else
    outcomes[0] = score(estimates, truth_v, truth_i, config.geometry);
  return reduce(outcomes, truth.size());
}

}  // namespace tomobss
