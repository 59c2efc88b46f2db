#pragma once

#include <stdexcept>
#include <string>

namespace zeno {

// Invalid user-supplied parameters or configuration. The message names the field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Numerical failure: quadrature non-convergence, loss of conservation, etc.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace zeno
