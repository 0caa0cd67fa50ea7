#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deadcore {

enum class ErrorKind {
  InvalidParams,
  CriticalRegime,
  UnsupportedGameRange,
  VanishingGradient,
  NonSmoothPoint,
  StencilOutOfDomain,
  NotApplicable,
  InsufficientSignal,
  NoFreeBoundary,
  DomainTooCoarse,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace deadcore
