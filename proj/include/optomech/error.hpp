#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optomech {

enum class ErrorKind {
    InvalidArgument,
    StepFailure,
    Diverged,
    SingularDenominator,
    DegenerateExponents,
    NotStable,
    Unphysical,
    NonPhysical,
    NonPositive,
    SingularCM,
    Singular,
    NoConvergence,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so that callers (the sweep
// runner in particular) can classify it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace optomech
