#pragma once

namespace xray::cli {

/// Parses argv, dispatches to a subcommand and maps failures to exit codes.
/// Errors are printed to stderr as a single `error[<code>]: <message>` line.
int run(int argc, char** argv);

}  // namespace xray::cli
