#ifndef SPDT_ERRORS_HPP
#define SPDT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spdt {

// Command-line / configuration misuse. CLI exit code 1.
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad input data or a violated network invariant. CLI exit code 2.
struct data_error : std::runtime_error {
    explicit data_error(const std::string &msg) : std::runtime_error(msg) {}
};

// An estimator could not produce a value (infeasible precondition,
// no sign change in the bracket, iteration cap). CLI exit code 3.
struct fit_error : std::runtime_error {
    explicit fit_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace spdt

#endif
