#pragma once

#include <iosfwd>

namespace relevance {

/// Command-line entry point. Returns 0 on success, 1 on usage errors (the
/// synopsis goes to `err`) and 2 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relevance
