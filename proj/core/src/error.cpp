#include "edp/error.hpp"

namespace edp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Boundary: return "boundary";
    case ErrorKind::EvaluationOverflow: return "evaluation overflow";
    case ErrorKind::Unreachable: return "u unreachable";
    case ErrorKind::NonConcave: return "non-concave K";
    case ErrorKind::SubMeanTarget: return "sub-mean target";
    case ErrorKind::SubMeanResidual: return "sub-mean residual target";
    case ErrorKind::WrapAroundRisk: return "wrap-around risk";
    case ErrorKind::IncompatibleCondition: return "incompatible condition";
    case ErrorKind::DegenerateSaddlepoint: return "degenerate saddlepoint";
    case ErrorKind::DegenerateEstimate: return "degenerate estimate";
    case ErrorKind::AcceptanceStarvation: return "acceptance starvation";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

bool is_precondition(ErrorKind kind) noexcept {
  return kind == ErrorKind::Precondition || kind == ErrorKind::Parse ||
         kind == ErrorKind::SubMeanTarget || kind == ErrorKind::SubMeanResidual ||
         kind == ErrorKind::IncompatibleCondition;
}

}  // namespace edp
