#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace propshift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitService = 3;

/// Entry point behind the `propshift` binary. `args` excludes the program
/// name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace propshift::cli
