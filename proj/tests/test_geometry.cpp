#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "tomobss/error.hpp"
#include "tomobss/geometry.hpp"

using namespace tomobss;

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

TEST(Geometry, DefaultSimulationConstants) {
  const auto g = AcquisitionGeometry::default_simulation();
  ASSERT_EQ(g.images(), 9u);
  EXPECT_DOUBLE_EQ(g.baselines().front(), -200.0);
  EXPECT_DOUBLE_EQ(g.baselines().back(), 200.0);
  EXPECT_NEAR(g.wavelength() * g.range(), 21840.0, 1e-6);
  EXPECT_DOUBLE_EQ(g.aperture(), 400.0);
}

TEST(Geometry, RejectsInvalidInputs) {
  EXPECT_THROW(AcquisitionGeometry({0.0}, 0.031, 7e5), Error);
  EXPECT_THROW(AcquisitionGeometry({0.0, 1.0}, 0.0, 7e5), Error);
  EXPECT_THROW(AcquisitionGeometry({0.0, 1.0}, 0.031, -1.0), Error);
  EXPECT_THROW(AcquisitionGeometry({0.0, NAN}, 0.031, 7e5), Error);
  try {
    AcquisitionGeometry({5.0, 5.0, 5.0}, 0.031, 7e5);
    FAIL() << "zero aperture accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateGeometry);
  }
}

TEST(Geometry, RayleighResolution) {
  const auto g = AcquisitionGeometry::default_simulation();
  EXPECT_NEAR(rayleigh_resolution(g), 27.3, 0.05);

  const AcquisitionGeometry wide({-400.0, 0.0, 400.0}, g.wavelength(), g.range());
  EXPECT_NEAR(rayleigh_resolution(wide), rayleigh_resolution(g) / 2.0, 1e-12);

  const AcquisitionGeometry narrow({-100.0, 0.0, 100.0}, 0.031, 21840.0 / 0.031);
  EXPECT_NEAR(rayleigh_resolution(narrow), 54.6, 1e-9);
}

TEST(SteeringVector, ZeroElevationHasZeroPhase) {
  const auto g = AcquisitionGeometry::default_simulation();
  const auto r = steering_vector(g, 0.0).values();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(r(i).real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r(i).imag(), 0.0, 1e-15);
  }
}

TEST(SteeringVector, PhaseAtOuterBaseline) {
  const auto g = AcquisitionGeometry::default_simulation();
  const auto r = steering_vector(g, 40.0).values();
  const double expected = wrap(-4.0 * kPi * 200.0 * 40.0 / 21840.0);
  EXPECT_NEAR(wrap(std::arg(r(8)) - expected), 0.0, 1e-9);
}

TEST(SteeringVector, UnitNormAndConstantModulus) {
  const auto g = AcquisitionGeometry::default_simulation();
  for (double s : {-150.0, -3.3, 0.0, 27.3, 40.0, 91.0}) {
    const auto r = steering_vector(g, s).values();
    EXPECT_NEAR(r.norm(), 1.0, 1e-12);
    for (Eigen::Index i = 0; i < r.size(); ++i) EXPECT_NEAR(std::abs(r(i)), 1.0 / 3.0, 1e-12);
  }
}

TEST(SteeringVector, InnerProductDependsOnlyOnSeparation) {
  const auto g = AcquisitionGeometry::default_simulation();
  const double a = std::abs(steering_vector(g, 10.0).values().dot(steering_vector(g, 30.0).values()));
  const double b = std::abs(steering_vector(g, -55.0).values().dot(steering_vector(g, -35.0).values()));
  EXPECT_NEAR(a, b, 1e-12);
  EXPECT_NEAR(std::abs(steering_vector(g, 12.0).values().dot(steering_vector(g, 12.0).values())), 1.0, 1e-12);
}

TEST(SteeringVector, DeformationAddsLineOfSightPhase) {
  const auto g = AcquisitionGeometry::default_simulation();
  std::vector<double> times{0, 1, 2, 3, 4, 5, 6, 7, 8};
  ScattererParams p{25.0, 1.0, {{0.002, times}}};
  const auto r = steering_vector(g, p).values();
  const auto base = steering_vector(g, 25.0).values();
  for (std::size_t n = 0; n < 9; ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    const double expected = -4.0 * kPi * 0.002 * times[n] / g.wavelength();
    EXPECT_NEAR(wrap(std::arg(r(i)) - std::arg(base(i)) - expected), 0.0, 1e-9);
  }
}

TEST(SteeringVector, RejectsNonFiniteElevation) {
  const auto g = AcquisitionGeometry::default_simulation();
  EXPECT_THROW(steering_vector(g, NAN), Error);
}

TEST(ModelCovariance, RankOneScatterer) {
  const auto g = AcquisitionGeometry::default_simulation();
  const auto c = model_covariance(g, {{40.0, 1.0, {}}}, 0.0);
  const RVector ev = c.eigenvalues();
  EXPECT_NEAR(ev(ev.size() - 1), 1.0, 1e-12);
  EXPECT_NEAR(ev(ev.size() - 2), 0.0, 1e-12);
}

TEST(ModelCovariance, NoiseOnly) {
  const auto g = AcquisitionGeometry::default_simulation();
  const auto c = model_covariance(g, {}, 2.0);
  EXPECT_NEAR((c.matrix() - 2.0 * CMatrix::Identity(9, 9)).norm(), 0.0, 1e-15);
}

TEST(ModelCovariance, NegativeNoiseRejected) {
  const auto g = AcquisitionGeometry::default_simulation();
  EXPECT_THROW(model_covariance(g, {{0.0, 1.0, {}}}, -1.0), Error);
}

// Nonzero eigenvalues of R S R^H equal those of the 2x2 matrix S^1/2 R^H R S^1/2.
TEST(ModelCovariance, TwoScattererEigenvaluesMatchReducedProblem) {
  const auto g = AcquisitionGeometry::default_simulation();
  for (auto [a1, a2] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{1.2, 0.7}}) {
    const auto c = model_covariance(g, {{40.0, a1, {}}, {80.0, a2, {}}}, 0.0);
    const CVector r1 = steering_vector(g, 40.0).values();
    const CVector r2 = steering_vector(g, 80.0).values();
    const double rho = std::abs(r1.dot(r2));
    const double p = a1 * a1;
    const double q = a2 * a2;
    const double disc = std::sqrt((p - q) * (p - q) + 4.0 * p * q * rho * rho);
    const RVector ev = c.eigenvalues();
    EXPECT_NEAR(ev(8), 0.5 * (p + q + disc), 1e-12);
    EXPECT_NEAR(ev(7), 0.5 * (p + q - disc), 1e-12);
    EXPECT_NEAR(ev(6), 0.0, 1e-12);
    if (a1 == a2) {
      EXPECT_NEAR(ev(8), 1.0 + rho, 1e-12);
      EXPECT_NEAR(ev(7), 1.0 - rho, 1e-12);
    }
  }
}

TEST(ModelCovariance, HermitianPsdAndTrace) {
  const auto g = AcquisitionGeometry::default_simulation();
  const auto c = model_covariance(g, {{10.0, 1.5, {}}, {33.0, 0.5, {}}, {-20.0, 1.0, {}}}, 0.3);
  EXPECT_LE((c.matrix() - c.matrix().adjoint()).norm(), 1e-12 * c.frobenius_norm());
  EXPECT_GE(c.eigenvalues().minCoeff(), -1e-10);
  EXPECT_NEAR(c.trace(), 2.25 + 0.25 + 1.0 + 9 * 0.3, 1e-12);
}
