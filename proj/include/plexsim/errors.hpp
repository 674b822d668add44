#pragma once

#include <stdexcept>
#include <string>

namespace plexsim {

/// Linear-algebra failure that retrying cannot fix (singular or badly
/// conditioned system). The message carries the diagnostic, e.g. which
/// floating component or simulation step broke the solve.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& message)
        : std::runtime_error(message) {}
};

/// Configuration rejected during parsing or validation. `field()` names the
/// offending section/key (or node) so the CLI can point at it.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace plexsim
