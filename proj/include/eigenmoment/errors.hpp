#pragma once

#include <stdexcept>
#include <string>

namespace eigenmoment {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveRadius : Error { using Error::Error; };
struct InvalidGrid : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct NotMonotone : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct NonFiniteIteration : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InsufficientDepth : Error { using Error::Error; };
struct OdeBlowup : Error { using Error::Error; };
struct NonSmoothBounds : Error { using Error::Error; };
struct PositiveCurvature : Error { using Error::Error; };
struct InfeasibleHypothesis : Error { using Error::Error; };
struct NotComparable : Error { using Error::Error; };
struct PreconditionViolation : Error { using Error::Error; };
struct UnbalancedSpec : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace eigenmoment
