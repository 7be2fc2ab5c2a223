#pragma once

namespace tritz {

/// Command-line front end: subcommands study, solve, errors, rate.
/// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace tritz
