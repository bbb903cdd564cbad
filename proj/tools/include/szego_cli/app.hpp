#pragma once

#include <iosfwd>

#include "szego_cli/config.hpp"

namespace szego::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,   ///< validation or verification failure
  kUsageError = 2,    ///< bad command line or configuration
  kNumericalError = 3 ///< quadrature, root solve or fit did not converge
};

/// Subcommands. Each reads an already validated config, writes its files
/// under config.out and a short summary to `out`, and returns an ExitCode.
int run_validate(const RunConfig& config, std::ostream& out);
int run_norms(const RunConfig& config, std::ostream& out);
int run_szego(const RunConfig& config, std::ostream& out);
int run_coeffs(const RunConfig& config, std::ostream& out);
int run_verify(const RunConfig& config, std::ostream& out);

/// Full command line: `szego <subcommand> --config <path> [overrides]`.
/// Library and config errors are mapped to exit codes here.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace szego::cli
