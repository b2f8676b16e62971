#include "dpbench/precision.hpp"

#include "dpbench/errors.hpp"

namespace dpbench {

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::Binary32: return "binary32";
    case Precision::Df64: return "df64";
    case Precision::Binary64: return "binary64";
  }
  return "unknown";
}

Precision parse_precision(std::string_view text) {
  if (text == "binary32" || text == "f32" || text == "float") return Precision::Binary32;
  if (text == "df64" || text == "emulated") return Precision::Df64;
  if (text == "binary64" || text == "f64" || text == "double") return Precision::Binary64;
  throw UsageError("unknown precision '" + std::string(text) + "' (expected binary32, df64 or binary64)");
}

}  // namespace dpbench
