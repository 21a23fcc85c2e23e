#pragma once

#include <stdexcept>
#include <string>

namespace poholab {

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct ExtrapolationError : std::runtime_error {
    explicit ExtrapolationError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a linear solve meets a direction of non-positive curvature,
/// i.e. the discrete Delta + h operator is not positive definite.
struct IndefiniteSystemError : NumericError {
    explicit IndefiniteSystemError(const std::string& what) : NumericError(what) {}
};

struct IterationLimitError : NumericError {
    explicit IterationLimitError(const std::string& what) : NumericError(what) {}
};

struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

struct NormalizationError : std::runtime_error {
    explicit NormalizationError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace poholab
