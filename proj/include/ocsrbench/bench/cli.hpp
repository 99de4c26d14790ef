#pragma once

#include <ostream>

namespace ocsrbench::bench {

/// Exit codes of the ocsrbench command line.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOperational = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands validate, convert, collect, score, report, mosaic-stats. `--json` switches
/// every subcommand to a single JSON object on `out`. Never throws.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ocsrbench::bench
