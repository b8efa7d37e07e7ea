#pragma once

#include <stdexcept>
#include <string>

namespace idsfed {

// Bad experiment configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing input data (CLI exit code 2).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace idsfed
