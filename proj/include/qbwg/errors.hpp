#ifndef QBWG_ERRORS_HPP
#define QBWG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qbwg {

// Invalid user input: bad parameter ranges, malformed config.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical routine could not deliver its contract (non-convergence,
// invariant breach, evaluation at a forbidden point).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qbwg

#endif
