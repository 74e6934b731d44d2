#ifndef CGOK_ERRORS_HPP
#define CGOK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cgok {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operand dimensions disagree (point vs polynomial, matrix sizes, ...).
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// Kahler potential failed to produce a Hermitian positive definite metric.
class PotentialError : public Error {
public:
    explicit PotentialError(const std::string& msg) : Error(msg) {}
};

/// Chart differentials are linearly dependent at the anchor point.
class ChartError : public Error {
public:
    explicit ChartError(const std::string& msg) : Error(msg) {}
};

/// Morse certification failed after the allowed number of perturbation retries.
class MorseSearchError : public Error {
public:
    explicit MorseSearchError(const std::string& msg) : Error(msg) {}
};

/// Amplitude construction received coincident separation points.
class SeparationError : public Error {
public:
    explicit SeparationError(const std::string& msg) : Error(msg) {}
};

/// Quadrature node count violates the oscillation guard for the requested h.
class OscillationError : public Error {
public:
    explicit OscillationError(const std::string& msg) : Error(msg) {}
};

/// Phase Hessian is degenerate where nondegeneracy is required.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

/// The h-extrapolation fit is ill-conditioned or otherwise unusable.
class FitError : public Error {
public:
    explicit FitError(const std::string& msg) : Error(msg) {}
};

/// Invalid experiment configuration (bad domain, schedule, density, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace cgok

#endif // CGOK_ERRORS_HPP
