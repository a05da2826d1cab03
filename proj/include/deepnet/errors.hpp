#pragma once

#include <stdexcept>
#include <string>

namespace deepnet {

// Error taxonomy shared by every module. The CLI maps these onto exit
// codes: config/parameter problems -> 1, data/format problems -> 2,
// numeric failures -> 3.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParamError : std::runtime_error {
    explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Config validation reports every offending field at once.
struct ConfigError : ParamError {
    explicit ConfigError(const std::string& msg) : ParamError(msg) {}
};

}  // namespace deepnet
