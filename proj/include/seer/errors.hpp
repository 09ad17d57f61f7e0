#pragma once

#include <stdexcept>
#include <string>

namespace seer {

/// Base of every error raised by the library. `kind()` is a stable
/// identifier (used by the CLI diagnostics and the Python bindings).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SEER_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

SEER_DEFINE_ERROR(ConstantColumn);
SEER_DEFINE_ERROR(SingularBasis);
SEER_DEFINE_ERROR(NotSymmetric);
SEER_DEFINE_ERROR(NotPositiveDefinite);
SEER_DEFINE_ERROR(InvalidWeights);
SEER_DEFINE_ERROR(DegenerateComponent);
SEER_DEFINE_ERROR(NullCovariance);
SEER_DEFINE_ERROR(InsufficientDof);
SEER_DEFINE_ERROR(MissingVariable);
SEER_DEFINE_ERROR(NonNumericCell);
SEER_DEFINE_ERROR(ConfigError);
SEER_DEFINE_ERROR(UnknownComponent);

#undef SEER_DEFINE_ERROR

} // namespace seer
