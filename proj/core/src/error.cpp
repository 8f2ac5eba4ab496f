#include "tomobss/error.hpp"

namespace tomobss {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return "invalid input";
    case ErrorKind::kDegenerateGeometry:
      return "degenerate geometry";
    case ErrorKind::kDegenerateInput:
      return "degenerate input";
    case ErrorKind::kNoSignal:
      return "no signal";
    case ErrorKind::kNoPeak:
      return "no peak";
    case ErrorKind::kUndefinedRatio:
      return "undefined ratio";
    case ErrorKind::kIo:
      return "i/o error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tomobss
