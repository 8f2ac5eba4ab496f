#pragma once

#include <filesystem>
#include <iosfwd>

#include "tomobss/types.hpp"

namespace tomobss {

// Binary layout: rows and cols as little-endian uint64, then the entries in
// row-major order as interleaved little-endian float64 (re, im).

void write_matrix(std::ostream& os, const CMatrix& m);
void write_matrix(const std::filesystem::path& path, const CMatrix& m);

/// Throws kIo when the stream is short, has trailing bytes or the header is
/// implausible.
CMatrix read_matrix(std::istream& is);
CMatrix read_matrix(const std::filesystem::path& path);

}  // namespace tomobss
