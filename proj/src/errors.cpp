#include "errors.hpp"

namespace pfde {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::ResourceLimit: return "resource_limit";
    case ErrorKind::FactoringBudget: return "factoring_budget";
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Semantic: return "semantic";
    case ErrorKind::Unbound: return "unbound_variable";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Checkpoint: return "checkpoint";
    case ErrorKind::Io: return "io";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

}  // namespace pfde
