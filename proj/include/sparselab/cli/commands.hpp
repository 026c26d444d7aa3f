#pragma once

#include <iosfwd>

namespace sparselab::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_parse = 2,
  exit_parameter = 3,
  exit_degenerate = 4,
  exit_baseline = 5,
};

/// Entry point of the `sparselab` tool. The JSON run report goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparselab::cli
