#pragma once

namespace fcit {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 usage error, 2 I/O or format error, 3 numeric failure.
int run_cli(int argc, const char* const* argv);

}  // namespace fcit
