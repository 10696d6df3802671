#pragma once

namespace namekit {

// Full command-line entry point: parses argv, dispatches to one of the
// subcommands (ingest, train, check, suggest, eval, ablate) and maps errors
// to exit codes. Returns 0 on success, 2 for usage or configuration errors,
// 1 for runtime failures.
int run_cli(int argc, const char* const* argv);

}  // namespace namekit
