#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adasel {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  RankDeficient,
  NotOrthonormal,
  NotPositiveSemidefinite,
  OutOfRange,
  InvalidM,
  TooFewSamples,
  AmbiguousLabels,
  NoFeasiblePlatform,
  MissingRecord,
  UnlabeledScenario,
  EmptyProfile,
  EmptyStream,
  TooFewFrames,
  DegenerateWindow,
  ConfigInvalid,
  Misaligned,
  BadMagic,
  TruncatedPayload,
  TrailingBytes,
  DimensionOverflow,
  DuplicateKey,
  NegativeError,
  MalformedRow,
  UnsupportedVersion,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message carries context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }
  /// Same code, message prefixed with `context: `.
  Error with_context(const std::string& context) const {
    return Error(code_, context + ": " + detail_);
  }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Raised by PCA when the centered samples do not span `requested` dimensions.
class RankDeficientError : public Error {
 public:
  RankDeficientError(int achievable_rank, int requested)
      : Error(ErrorCode::RankDeficient,
              "centered samples have rank " + std::to_string(achievable_rank) +
                  " < requested subspace dimension " + std::to_string(requested)),
        rank_(achievable_rank) {}

  int achievable_rank() const noexcept { return rank_; }

 private:
  int rank_;
};

struct PlatformDiagnostic {
  std::string platform_id;
  double cost = 0.0;
  double best_mean_error = 0.0;  // +inf when the platform has no feasible combo
  bool within_budget = false;
};

/// Raised when no platform satisfies the design-time constraints. The
/// diagnostics let a caller see how far each platform is from feasibility.
class NoFeasiblePlatformError : public Error {
 public:
  NoFeasiblePlatformError(std::string message, std::vector<PlatformDiagnostic> diagnostics)
      : Error(ErrorCode::NoFeasiblePlatform, message), diagnostics_(std::move(diagnostics)) {}

  const std::vector<PlatformDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<PlatformDiagnostic> diagnostics_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace adasel
