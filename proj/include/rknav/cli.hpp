#pragma once

// Command-line entry point.  Subcommands: describe, connect, verify, reach,
// geodesic, zermelo; every one takes --config plus optional overrides
// (--seed, --out, --tol, --eps-schedule, --k-max, --grid).  Documents go to
// stdout; path tables and document copies go under --out.  Identical config
// and seed produce byte-identical output.
//
// Exit codes: 0 success, 2 config error, 3 hypothesis violation, 4 solver
// failure, 5 property failure.

namespace rknav {

int run_cli(int argc, const char* const* argv);

}  // namespace rknav
