#include "tdvp/errors.hpp"

namespace tdvp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::truncation_insufficient: return "truncation-insufficient";
    case ErrorKind::unsupported_order: return "unsupported-order";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::boundary_proximity: return "boundary-proximity";
    case ErrorKind::internal_consistency: return "internal-consistency";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::no_spectrum: return "no-spectrum";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace tdvp
