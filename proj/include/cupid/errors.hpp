#pragma once

#include <stdexcept>
#include <string>

namespace cupid {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes
// (config -> 2, numeric -> 3, incompatibility -> 4).

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IncompatibilityError : std::runtime_error {
    explicit IncompatibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cupid
