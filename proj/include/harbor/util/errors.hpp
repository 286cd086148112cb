#ifndef HARBOR_UTIL_ERRORS_HPP
#define HARBOR_UTIL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace harbor {

/// Bad configuration: missing files, invalid parameter values. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data. CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular design, non-convergence, separation. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace harbor

#endif
