#pragma once

#include <string>
#include <string_view>

namespace dpbench {

enum class Precision { Binary32, Df64, Binary64 };

std::string_view to_string(Precision p);

/// Accepts "binary32"/"f32"/"float", "df64"/"emulated", "binary64"/"f64"/"double".
/// Throws UsageError on anything else.
Precision parse_precision(std::string_view text);

}  // namespace dpbench
