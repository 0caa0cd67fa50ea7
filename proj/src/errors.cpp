#include "deadcore/errors.hpp"

namespace deadcore {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::CriticalRegime: return "CriticalRegime";
    case ErrorKind::UnsupportedGameRange: return "UnsupportedGameRange";
    case ErrorKind::VanishingGradient: return "VanishingGradient";
    case ErrorKind::NonSmoothPoint: return "NonSmoothPoint";
    case ErrorKind::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InsufficientSignal: return "InsufficientSignal";
    case ErrorKind::NoFreeBoundary: return "NoFreeBoundary";
    case ErrorKind::DomainTooCoarse: return "DomainTooCoarse";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace deadcore
