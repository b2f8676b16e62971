#pragma once

#include <exception>
#include <ostream>

namespace dpbench::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;    // parse, schema and validation errors
inline constexpr int kExitDevice = 5;  // device, feature and shader errors

int exit_code_for(const std::exception& e);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpbench::cli
