#ifndef CBO_TOOLS_CLI_HPP_
#define CBO_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace cbo::cli {

// Environment variables override flags: --bandwidth-mbps <-> CBO_BANDWIDTH_MBPS.
inline constexpr const char* kEnvPrefix = "CBO_";

// args excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string config_hash(const std::string& canonical);

}  // namespace cbo::cli

#endif  // CBO_TOOLS_CLI_HPP_
