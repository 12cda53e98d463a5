#pragma once

#include <iosfwd>

namespace persid {

/// Exit codes: 0 completed (pass/fail is report data), 2 usage or
/// configuration error, 3 runtime error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace persid
