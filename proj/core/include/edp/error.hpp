#pragma once

#include <stdexcept>
#include <string>

namespace edp {

// Every failure the library reports carries one of these kinds so callers
// (notably the CLI) can map them to exit codes without parsing messages.
enum class ErrorKind {
  Precondition,          // caller violated a documented precondition
  Boundary,              // evaluation at or below the support boundary
  EvaluationOverflow,    // a closure produced a non-finite value
  Unreachable,           // bracket search exhausted (psi or tilt target)
  NonConcave,            // Laplace window needs h'(x) > 0
  SubMeanTarget,         // tilt target below m(0)
  SubMeanResidual,       // sequential tilt residual target below m(0)
  WrapAroundRisk,        // FFT buffer too short for requested convolution
  IncompatibleCondition, // conditioning point outside convolution support
  DegenerateSaddlepoint, // tail formula needs t_n > 0
  DegenerateEstimate,    // Monte Carlo produced no accepted draws
  AcceptanceStarvation,  // exceedance sampler acceptance rate too low
  Parse,                 // malformed spec document or CLI value
};

const char* to_string(ErrorKind kind) noexcept;

// Precondition and Parse errors are "caller" errors; the rest are numeric.
bool is_precondition(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace edp
