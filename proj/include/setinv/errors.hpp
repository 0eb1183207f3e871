#ifndef SETINV_ERRORS_HPP
#define SETINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace setinv {

// Invalid problem or method configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A run could not complete (CLI exit code 2).
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured resource budget was exceeded (CLI exit code 3).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedModelError : public RunError {
public:
    using RunError::RunError;
};

} // namespace setinv

#endif
