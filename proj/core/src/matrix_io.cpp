#include "tomobss/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tomobss/error.hpp"

namespace tomobss {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) fail(ErrorKind::kIo, "truncated matrix file");
  return to_little(v);
}

}  // namespace

void write_matrix(std::ostream& os, const CMatrix& m) {
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put<double>(os, m(i, j).real());
      put<double>(os, m(i, j).imag());
    }
  }
  if (!os) fail(ErrorKind::kIo, "failed writing matrix");
}

void write_matrix(const std::filesystem::path& path, const CMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  write_matrix(os, m);
}

CMatrix read_matrix(std::istream& is) {
  const auto rows = get<std::uint64_t>(is);
  const auto cols = get<std::uint64_t>(is);
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (rows == 0 || cols == 0 || rows > kLimit || cols > kLimit || rows * cols > (kLimit >> 4))
    fail(ErrorKind::kIo, "implausible matrix header");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      m(i, j) = cdouble(re, im);
    }
  }
  if (is.peek() != std::char_traits<char>::eof()) fail(ErrorKind::kIo, "trailing bytes after matrix body");
  return m;
}

CMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::kIo, "cannot open " + path.string());
  return read_matrix(is);
}

}  // namespace tomobss
