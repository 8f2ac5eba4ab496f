#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomobss {

enum class ErrorKind {
  kInvalidInput,
  kDegenerateGeometry,
  kDegenerateInput,
  kNoSignal,
  kNoPeak,
  kUndefinedRatio,
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) map failures onto exit codes without
/// string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace tomobss
