#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace saea::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_aborted = 2;
inline constexpr int exit_check_failed = 3;

/// Entry point; `args` excludes the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Long flag names (per subcommand, "verb --flag") that do not appear in their --help text.
std::vector<std::string> undocumented_flags();

/// All long flag names of a subcommand, in registration order.
std::vector<std::string> flags_of(const std::string& verb);

}  // namespace saea::cli
