#pragma once

#include <ostream>

namespace reprtrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStrict = 3;  // --strict and the report has gaps

// Parses argv and dispatches to validate / run / compare / report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Worker count for compare: REPRTRACE_THREADS if set and positive, else the
// hardware concurrency, never more than `jobs`.
unsigned worker_count(std::size_t jobs);

}  // namespace reprtrace::cli
