#ifndef MSSD_CLI_HPP
#define MSSD_CLI_HPP

#include <string>
#include <vector>

namespace mssd::cli {

/// Runs the command line interface. args excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on runtime failures.
int run(const std::vector<std::string>& args);

int run(int argc, char** argv);

} // namespace mssd::cli

#endif // MSSD_CLI_HPP
