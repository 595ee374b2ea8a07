#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace overbook {

enum class ErrorKind {
  kInvalidArgument,
  kDegenerateThreshold,
  kUndefinedVirtualValue,
  kRegularityViolation,
  kUseAtomsVariant,
  kStateSpaceTooLarge,
  kInvalidSpec,
  kOutOfRange,
  kIo,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDegenerateThreshold: return "degenerate-threshold";
    case ErrorKind::kUndefinedVirtualValue: return "undefined-virtual-value";
    case ErrorKind::kRegularityViolation: return "regularity-violation";
    case ErrorKind::kUseAtomsVariant: return "use-atoms-variant";
    case ErrorKind::kStateSpaceTooLarge: return "state-space-too-large";
    case ErrorKind::kInvalidSpec: return "invalid-spec";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

// Every failure raised by the library carries a kind so callers (and tests)
// can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace detail
}  // namespace overbook
