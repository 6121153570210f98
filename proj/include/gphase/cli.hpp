#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gphase {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitUsage = 2;

struct ConfigKey {
  const char* name;
  const char* default_value;  // "" = unset
  const char* help;
};

/// Every key accepted in a config file or as a --key flag.
const std::vector<ConfigKey>& config_keys();

/// Entry point of the gphase tool; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gphase
