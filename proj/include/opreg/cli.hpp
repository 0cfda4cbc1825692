#pragma once

#include <iosfwd>

namespace opreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIoOrConfig = 1;
inline constexpr int kExitSolverFailure = 2;

/// Entry point of the `opreg` tool: `fit`, `bench lasso`, `bench phase`.
/// Every leaf command takes `--config FILE` with key=value lines (keys are the
/// long flag names without dashes); explicit flags win over the file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opreg::cli
