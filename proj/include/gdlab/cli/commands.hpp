#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gdlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Environment variable giving the default output directory.
inline constexpr const char* kOutDirEnv = "GDLAB_OUT_DIR";

/// Entry point shared by the gdlab executable and the tests. args[0] is the
/// program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gdlab::cli
