#pragma once

namespace dwcli {

/// Full command-line entry point. Returns the process exit code:
/// 0 on success (monitor: no signal), 2 when monitoring ended with a signal,
/// 1 on any error.
int run_cli(int argc, const char* const* argv);

}  // namespace dwcli
