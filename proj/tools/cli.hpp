#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conu::cli {

/// Runs one invocation; `args` excludes the program name. Returns the
/// process exit code. Usage and errors go to `err`, progress to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace conu::cli
