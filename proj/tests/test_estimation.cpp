#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tomobss/error.hpp"
#include "tomobss/estimation.hpp"
#include "tomobss/geometry.hpp"
#include "tomobss/separation.hpp"

using namespace tomobss;

namespace {

const AcquisitionGeometry kGeom = AcquisitionGeometry::default_simulation();

CVector steer(double s) { return steering_vector(kGeom, s).values(); }

PeriodogramGrid local_grid(double lo, double hi, double step) {
  PeriodogramGrid g;
  g.min_elevation = lo;
  g.max_elevation = hi;
  g.step = step;
  return g;
}

}  // namespace

TEST(PeriodogramGrid, DefaultCoversOneAmbiguityPeriod) {
  const auto g = PeriodogramGrid::default_for(kGeom);
  EXPECT_NEAR(g.max_elevation - g.min_elevation, 218.4, 0.3);
  EXPECT_NEAR(g.step, 0.273, 1e-12);
  EXPECT_NO_THROW(g.validate(9));
}

TEST(PeriodogramGrid, RejectsBadGrids) {
  EXPECT_THROW(local_grid(0, 10, 0).validate(9), Error);
  EXPECT_THROW(local_grid(10, 0, 1).validate(9), Error);
  auto big = local_grid(0, 1e7, 1e-3);
  EXPECT_THROW(big.validate(9), Error);
  auto g = local_grid(0, 10, 1);
  g.deformation.push_back({{0, 1, 2}, 0, 1, 0.5});
  EXPECT_THROW(g.validate(9), Error);
  EXPECT_EQ(g.elevation_points(), 11u);
}

TEST(Periodogram, SelfMatchAtGridPoint) {
  const auto grid = PeriodogramGrid::default_for(kGeom);
  for (double s : {-54.6, 0.0, 27.3, 40.04}) {
    const auto r = periodogram(steer(s), kGeom, grid);
    EXPECT_NEAR(r.elevation, s, grid.step / 2 + 1e-9) << s;
    EXPECT_NEAR(r.peak_coherence, 1.0, 1e-3);
  }
}

TEST(Periodogram, RefinementBetweenGridPoints) {
  const auto grid = local_grid(-100, 100, 0.5);
  const auto r = periodogram(steer(40.17), kGeom, grid, {true, false});
  EXPECT_NEAR(r.elevation, 40.17, 0.01);
}

TEST(Periodogram, SweepOfElevations) {
  const auto grid = PeriodogramGrid::default_for(kGeom);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    const double s = u(rng);
    const auto r = periodogram(steer(s), kGeom, grid, {true, false});
    EXPECT_NEAR(r.elevation, s, 0.01) << s;
  }
}

TEST(Periodogram, MixtureOfEqualScatterersPeaksAtMidpoint) {
  const double half = rayleigh_resolution(kGeom) / 2.0;
  const auto c = model_covariance(kGeom, {{40.0, 1.0, {}}, {40.0 + half, 1.0, {}}}, 0.0);
  const CVector pc = pca_components(c).vectors.col(0);
  const auto r = periodogram(pc, kGeom, local_grid(0, 120, 0.1), {true, false});
  EXPECT_NEAR(r.elevation, 40.0 + half / 2.0, 0.05);
}

TEST(Periodogram, TiesGoToSmallestElevation) {
  // A uniform stack is periodic, so the grid endpoints tie exactly.
  const double period = *kGeom.ambiguity_period();
  const auto grid = local_grid(10.0, 10.0 + period, period / 8.0);
  const auto r = periodogram(steer(10.0), kGeom, grid);
  EXPECT_DOUBLE_EQ(r.elevation, 10.0);
}

TEST(Periodogram, FlatProfileHasNoPeak) {
  CVector e1 = CVector::Zero(9);
  e1(0) = 1.0;
  try {
    periodogram(e1, kGeom, PeriodogramGrid::default_for(kGeom));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoPeak);
  }
}

TEST(Periodogram, ProfileCsv) {
  const auto r = periodogram(steer(5.0), kGeom, local_grid(0, 10, 1), {false, true});
  ASSERT_EQ(r.profile.size(), 11u);
  std::ostringstream os;
  write_profile_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "s_m,coherence");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 11u);
}

TEST(Periodogram, RecoversDeformationRate) {
  std::vector<double> times;
  for (int n = 0; n < 9; ++n) times.push_back(0.1 * n * n - 0.35 * n);
  ScattererParams p{20.0, 1.0, {{0.012, times}}};
  const CVector y = steering_vector(kGeom, p).values();
  auto grid = local_grid(0, 40, 0.5);
  grid.deformation.push_back({times, -0.02, 0.02, 0.001});
  const auto r = periodogram(y, kGeom, grid);
  EXPECT_NEAR(r.elevation, 20.0, 0.25);
  ASSERT_EQ(r.deformation.size(), 1u);
  EXPECT_NEAR(r.deformation[0], 0.012, 0.0005);
  std::ostringstream os;
  write_profile_csv(os, periodogram(y, kGeom, grid, {false, true}));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "s_m,p_1,coherence");
}

TEST(AngularBias, Examples) {
  const CVector r = steer(30.0);
  EXPECT_NEAR(angular_bias(r, r), 0.0, 1e-12);
  EXPECT_NEAR(angular_bias(std::polar(3.0, 1.1) * r, r), 0.0, 1e-12);
  CVector a = CVector::Zero(2), b = CVector::Zero(2);
  a(0) = 1.0;
  b(1) = 1.0;
  EXPECT_NEAR(angular_bias(a, b), 90.0, 1e-12);
  CVector c(2);
  c << 1.0, 1.0;
  EXPECT_NEAR(angular_bias(c, a), 45.0, 1e-12);
  EXPECT_THROW(angular_bias(CVector::Zero(2), a), Error);
  EXPECT_THROW(angular_bias(a, CVector::Zero(3)), Error);
}

TEST(AngularBias, SymmetricAndUnitaryInvariant) {
  const CVector a = steer(12.0) + 0.3 * steer(50.0);
  const CVector b = steer(20.0);
  EXPECT_NEAR(angular_bias(a, b), angular_bias(b, a), 1e-12);
  CVector d(9);
  for (Eigen::Index i = 0; i < 9; ++i) d(i) = std::polar(1.0, 0.7 * static_cast<double>(i));
  EXPECT_NEAR(angular_bias(d.asDiagonal() * a, d.asDiagonal() * b), angular_bias(a, b), 1e-10);
}

TEST(AngularBias, ClosedFormForTwoSteeringVectors) {
  const CVector a = steer(0.0);
  const CVector b = steer(10.0);
  const double k = 4.0 * std::numbers::pi / 21840.0 * 10.0;
  cdouble sum{0.0, 0.0};
  for (double bn : kGeom.baselines()) sum += std::polar(1.0, k * bn);
  const double expected = std::acos(std::abs(sum) / 9.0) * 180.0 / std::numbers::pi;
  EXPECT_NEAR(angular_bias(a, b), expected, 1e-9);
}

TEST(RelativeBias, RatioAndUndefined) {
  const CVector r1 = steer(40.0);
  const CVector r2 = steer(67.3);
  EXPECT_NEAR(relative_angular_bias(r2, r1, r2), 1.0, 1e-12);
  EXPECT_NEAR(relative_angular_bias(r1, r1, r2), 0.0, 1e-12);
  try {
    relative_angular_bias(r2, r1, r1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUndefinedRatio);
  }
}

TEST(Coherence, Examples) {
  const CVector r = steer(30.0);
  EXPECT_NEAR(ensemble_coherence(r, r), 1.0, 1e-12);
  EXPECT_NEAR(ensemble_coherence(5.0 * std::polar(1.0, 2.0) * r, r), 1.0, 1e-12);
  // Amplitudes are ignored.
  CVector scaled = r;
  for (Eigen::Index i = 0; i < 9; ++i) scaled(i) *= 1.0 + static_cast<double>(i);
  EXPECT_NEAR(ensemble_coherence(scaled, r), 1.0, 1e-12);
  CVector a(2), b(2);
  a << 1.0, 1.0;
  b << 1.0, -1.0;
  EXPECT_NEAR(ensemble_coherence(a, b), 0.0, 1e-12);
}

TEST(Coherence, RandomPhasesMatchRayleighMean) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  const CVector r = steer(0.0);
  const int trials = 20000;
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    CVector y(9);
    for (Eigen::Index i = 0; i < 9; ++i) y(i) = std::polar(1.0, u(rng));
    acc += ensemble_coherence(y, r);
  }
  // Large-N approximation; at N = 9 it is within a few percent.
  EXPECT_NEAR(acc / trials, std::sqrt(std::numbers::pi) / (2.0 * 3.0), 0.02);
}

TEST(PhaseBias, ZeroForMatchingAndGloballyShifted) {
  const CVector r = steer(35.0);
  EXPECT_LT(per_baseline_phase_bias(r, r).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(per_baseline_phase_bias(std::polar(1.0, 2.9) * r, r).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PhaseBias, LinearRampMapsToElevationShift) {
  const CVector r = steer(40.0);
  CVector ramped = r;
  for (std::size_t n = 0; n < 9; ++n) {
    const double deg = -2.0 + 4.0 * static_cast<double>(n) / 8.0;
    ramped(static_cast<Eigen::Index>(n)) *= std::polar(1.0, deg * std::numbers::pi / 180.0);
  }
  const RVector b = per_baseline_phase_bias(ramped, r);
  EXPECT_NEAR(b.maxCoeff() - b.minCoeff(), 4.0, 1e-9);
  EXPECT_NEAR(b.mean(), 0.0, 1e-9);
  const auto peak = periodogram(ramped, kGeom, local_grid(30, 50, 0.01), {true, false});
  EXPECT_NEAR(std::abs(peak.elevation - 40.0), 0.303, 0.01);
}
