#pragma once

#include <iosfwd>

namespace hppc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
// Usage or configuration problem.
inline constexpr int kExitUsage = 2;

// Entry point shared by the `hppc` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hppc::cli
