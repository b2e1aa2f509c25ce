#include "cica/error.hpp"

namespace cica {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::RankDeficient: return "rank-deficient";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::MissingClass: return "missing-class";
    case ErrorKind::InsufficientSamples: return "insufficient-samples";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Definiteness: return "definiteness";
  }
  return "unknown";
}

}  // namespace cica
