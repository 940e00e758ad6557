#ifndef CURVEFLOW_ERRORS_HPP
#define CURVEFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace curveflow {

struct DegenerateError : std::runtime_error {
    explicit DegenerateError(const std::string& m) : std::runtime_error(m) {}
};

struct CompatibilityError : std::runtime_error {
    explicit CompatibilityError(const std::string& m) : std::runtime_error(m) {}
};

struct BoundViolationError : std::runtime_error {
    explicit BoundViolationError(const std::string& m) : std::runtime_error(m) {}
};

struct RefitError : std::runtime_error {
    explicit RefitError(const std::string& m) : std::runtime_error(m) {}
};

struct StepError : std::runtime_error {
    explicit StepError(const std::string& m) : std::runtime_error(m) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace curveflow

#endif
