#pragma once

#include <iosfwd>

namespace cslsim {

/// Entry point of the command-line tool. Returns 0 on success, 1 on
/// configuration errors and 2 on numeric or fit failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cslsim
