#pragma once
#include <stdexcept>
#include <string>

namespace rknav {

// Error hierarchy; the CLI maps these onto its exit-code contract.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: unparsable config, malformed expression, invalid flag.
struct ConfigError : Error {
  using Error::Error;
};

// Point outside the manifold's domain, or a value outside a precondition.
struct DomainError : Error {
  using Error::Error;
};

// Invalid numeric parameter (eps <= 0 where positive required, etc).
struct ParameterError : Error {
  using Error::Error;
};

// Linear algebra breakdown: singular metric, failed factorization.
struct NumericalError : Error {
  using Error::Error;
};

// Velocity outside the admissible set, or an inadmissible control signal.
struct AdmissibilityError : Error {
  AdmissibilityError(const std::string& msg, long index = -1)
      : Error(msg), sample_index(index) {}
  long sample_index;  // offending sample, -1 if not sample-local
};

// Integration monitor breach: requested accuracy not maintained.
struct AccuracyError : Error {
  using Error::Error;
};

// A standing hypothesis of the method is violated (strong wind,
// x0 == x1 at a degenerate point, nonintegrability failure).
struct HypothesisViolation : Error {
  using Error::Error;
};

// Too few samples for a numerical operation.
struct InsufficientData : Error {
  using Error::Error;
};

// Path handed in with the wrong parametrization tag or unit-speed defect.
struct ParametrizationError : Error {
  using Error::Error;
};

}  // namespace rknav
