#pragma once

#include <iosfwd>

namespace adasel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

/// Entry point of the `adasel` tool. Subcommands: profile, select, eval,
/// synth. Never throws; every failure maps to an exit code and a message on
/// `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adasel::cli
