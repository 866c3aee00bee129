#include "mixed_spectra/error.hpp"

namespace mixed_spectra {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::DegenerateEdge: return "DegenerateEdge";
    case ErrorCode::AllNeumann: return "AllNeumann";
    case ErrorCode::InvalidAngles: return "InvalidAngles";
    case ErrorCode::InvalidSide: return "InvalidSide";
    case ErrorCode::InconsistentMesh: return "InconsistentMesh";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularStiffness: return "SingularStiffness";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::LevelCapExceeded: return "LevelCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace mixed_spectra
