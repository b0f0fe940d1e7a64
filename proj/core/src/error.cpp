#include "adasel/error.hpp"

namespace adasel {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidM: return "InvalidM";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::AmbiguousLabels: return "AmbiguousLabels";
    case ErrorCode::NoFeasiblePlatform: return "NoFeasiblePlatform";
    case ErrorCode::MissingRecord: return "MissingRecord";
    case ErrorCode::UnlabeledScenario: return "UnlabeledScenario";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Misaligned: return "Misaligned";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::NegativeError: return "NegativeError";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace adasel
