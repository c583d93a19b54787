// error.hpp
//
// Exception hierarchy for the library. Every failure mode has a named type so
// callers (and the CLI exit-code mapping) can distinguish configuration
// mistakes from numerical failures.

#pragma once

#include <stdexcept>
#include <string>

namespace sgp {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Material / tensor algebra
struct EllipticityViolation : Error { using Error::Error; };
struct ConvexityViolation : Error { using Error::Error; };

// Geometry
struct OutOfRange : Error { using Error::Error; };
struct SingularMap : Error { using Error::Error; };

// Boundary data
struct InsufficientSmoothness : Error { using Error::Error; };

// Discretization
struct InvalidDegree : Error { using Error::Error; };
struct QuadratureUnderflow : Error { using Error::Error; };
struct OrderTooHigh : Error { using Error::Error; };

// Solver
struct SingularSystem : Error { using Error::Error; };
struct IncompatibleData : Error { using Error::Error; };

// Unique-continuation lab
struct OriginSingular : Error { using Error::Error; };
struct SupportViolation : Error { using Error::Error; };
struct RadiusOutOfDomain : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };
struct RadiusOrdering : Error { using Error::Error; };

// CLI / orchestration
struct ConfigError : Error { using Error::Error; };
struct ExperimentError : Error { using Error::Error; };

} // namespace sgp
