#include "mpstomo/error.hpp"

namespace mpstomo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SizeExceeded: return "SizeExceeded";
    case ErrorKind::InconsistentBonds: return "InconsistentBonds";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::CutOutOfRange: return "CutOutOfRange";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ZeroProbability: return "ZeroProbability";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ShotsUnsupported: return "ShotsUnsupported";
    case ErrorKind::NotADensityMatrix: return "NotADensityMatrix";
    case ErrorKind::TruncationAbort: return "TruncationAbort";
    case ErrorKind::BondOverflow: return "BondOverflow";
    case ErrorKind::BadDigitString: return "BadDigitString";
    case ErrorKind::IncompleteLog: return "IncompleteLog";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace mpstomo
