#pragma once

#include <iosfwd>

namespace moran::cli {

enum ExitCode : int { Pass = 0, Fail = 1, Undecided = 2, InputError = 3 };

/// Entry point of the `moran` tool. Reports go to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace moran::cli
