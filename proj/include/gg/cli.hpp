#pragma once

#include <iosfwd>

namespace gg {

/// Exit codes: 0 success, 1 domain error (error name on `err`), 2 usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gg
