#pragma once

#include <iosfwd>

namespace spdelab::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

/// Entry point of the `spdelab` tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spdelab::cli
