#pragma once

namespace ampkit {

/// Command-line front end.  Exit codes:
///   0 success (cmd_design: ACCEPT)
///   2 parse or configuration error
///   3 design REJECT
///   4 I/O error
///   5 internal error
int run_cli(int argc, const char* const* argv);

}  // namespace ampkit
