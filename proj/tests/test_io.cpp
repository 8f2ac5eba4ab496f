#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

#include "tomobss/error.hpp"
#include "tomobss/matrix_io.hpp"
#include "tomobss/scene_io.hpp"

using namespace tomobss;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidInput;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tomobss_io_" + name);
}

}  // namespace

TEST(MatrixIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  CMatrix m(3, 5);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) m(i, j) = cdouble(n(rng), n(rng));
  std::stringstream ss;
  write_matrix(ss, m);
  const CMatrix back = read_matrix(ss);
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 5);
  EXPECT_EQ(back, m);

  const auto path = temp_path("roundtrip.bin");
  write_matrix(path, m);
  EXPECT_EQ(read_matrix(path), m);
  std::filesystem::remove(path);
}

TEST(MatrixIo, LittleEndianRowMajorLayout) {
  CMatrix m(1, 2);
  m << cdouble(1.0, 2.0), cdouble(3.0, 4.0);
  std::stringstream ss;
  write_matrix(ss, m);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 16u + 32u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2u);
  for (int i = 1; i < 8; ++i) EXPECT_EQ(bytes[static_cast<std::size_t>(i)], 0);
  double values[4];
  std::memcpy(values, bytes.data() + 16, sizeof(values));
  EXPECT_EQ(values[0], 1.0);
  EXPECT_EQ(values[1], 2.0);
  EXPECT_EQ(values[2], 3.0);
  EXPECT_EQ(values[3], 4.0);
}

TEST(MatrixIo, TruncatedOrTrailingBytesRejected) {
  CMatrix m = CMatrix::Ones(2, 2);
  std::stringstream ss;
  write_matrix(ss, m);
  const std::string bytes = ss.str();
  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_EQ(kind_of([&] { read_matrix(truncated); }), ErrorKind::kIo);
  std::istringstream trailing(bytes + "x");
  EXPECT_EQ(kind_of([&] { read_matrix(trailing); }), ErrorKind::kIo);
  std::istringstream header_only(bytes.substr(0, 5));
  EXPECT_EQ(kind_of([&] { read_matrix(header_only); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([] { read_matrix(temp_path("does_not_exist.bin")); }), ErrorKind::kIo);
}

TEST(SceneIo, ConfigRoundTrip) {
  SimulationConfig cfg;
  cfg.geometry = AcquisitionGeometry({-30.0, 0.0, 45.0}, 0.056, 850000.0);
  cfg.scatterers = {{12.5, 2.0, {{0.01, {-1.0, 0.0, 1.0}}}}, {-3.0, 0.5, {}}};
  cfg.noise_power = 0.125;
  cfg.looks = 321;
  cfg.seed = 987654321987ULL;
  const auto back = parse_config(dump_config(cfg));
  EXPECT_EQ(back.geometry.baselines(), cfg.geometry.baselines());
  EXPECT_EQ(back.geometry.wavelength(), cfg.geometry.wavelength());
  EXPECT_EQ(back.geometry.range(), cfg.geometry.range());
  ASSERT_EQ(back.scatterers.size(), 2u);
  EXPECT_EQ(back.scatterers[0].elevation_m, 12.5);
  EXPECT_EQ(back.scatterers[0].amplitude, 2.0);
  ASSERT_EQ(back.scatterers[0].deformation.size(), 1u);
  EXPECT_EQ(back.scatterers[0].deformation[0].coefficient, 0.01);
  EXPECT_EQ(back.scatterers[0].deformation[0].basis, (std::vector<double>{-1.0, 0.0, 1.0}));
  EXPECT_EQ(back.noise_power, 0.125);
  EXPECT_EQ(back.looks, 321u);
  EXPECT_EQ(back.seed, cfg.seed);

  const auto path = temp_path("config.json");
  save_config(path, cfg);
  EXPECT_EQ(load_config(path).looks, 321u);
  EXPECT_EQ(load_geometry(path).baselines(), cfg.geometry.baselines());
  std::filesystem::remove(path);
}

TEST(SceneIo, DefaultsForMissingKeys) {
  const auto cfg = parse_config("{}");
  EXPECT_EQ(cfg.geometry.images(), 9u);
  EXPECT_EQ(cfg.looks, 900u);
  EXPECT_TRUE(cfg.scatterers.empty());
}

TEST(SceneIo, GeometryRoundTrip) {
  const AcquisitionGeometry g({-10.0, 5.0, 20.0}, 0.03, 700000.0);
  const auto back = parse_geometry(dump_geometry(g));
  EXPECT_EQ(back.baselines(), g.baselines());
}

TEST(SceneIo, RejectsUnknownKeysAndMalformedJson) {
  EXPECT_EQ(kind_of([] { parse_config(R"({"lookz": 5})"); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([] { parse_config(R"({"scatterers": [{"elevation": 5}]})"); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([] { parse_config("{not json"); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([] { parse_config(R"({"looks": "many"})"); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([] { load_config(temp_path("missing.json")); }), ErrorKind::kIo);
}
