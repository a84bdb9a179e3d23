#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shortcheck::service {

// Exit codes of the shortcheck command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `shortcheck` command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace shortcheck::service
