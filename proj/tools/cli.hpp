#ifndef FND_TOOLS_CLI_HPP
#define FND_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace fnd::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 on success, 2 on usage or configuration errors, 1 on runtime
/// failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fnd::cli

#endif  // FND_TOOLS_CLI_HPP
