#ifndef SPDT_CLI_HPP
#define SPDT_CLI_HPP

#include <string>
#include <vector>

namespace spdt {

// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 fitting non-convergence.
int run_cli(const std::vector<std::string> &args);

extern const char *kVersion;

} // namespace spdt

#endif
