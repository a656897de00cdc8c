#pragma once

#include <stdexcept>
#include <string>

namespace hslog {

// Bad input: parameters, configs, preconditions. The CLI maps it to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed to converge or lost its bracket. Exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hslog
