#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpstomo {

enum class ErrorKind {
  SizeExceeded,
  InconsistentBonds,
  ShapeMismatch,
  WindowOutOfRange,
  CutOutOfRange,
  NotUnitary,
  NotNormalized,
  ZeroProbability,
  InvalidSpec,
  ShotsUnsupported,
  NotADensityMatrix,
  TruncationAbort,
  BondOverflow,
  BadDigitString,
  IncompleteLog,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace mpstomo
