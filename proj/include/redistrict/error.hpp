#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redistrict {

enum class ErrorCode {
  // configuration
  ConfigError,
  UnknownConfigKey,
  // input data
  DisconnectedGraph,
  DuplicatePrecinctId,
  DuplicateEdge,
  DanglingEdge,
  InvalidNode,
  InvalidEdge,
  MissingVoteColumn,
  MissingColumn,
  NonNumericValue,
  EmptyFile,
  MissingPrecinct,
  UnknownPrecinct,
  UnknownContest,
  InvalidPlan,
  InvalidSeedPlan,
  // runtime
  DisconnectedSubset,
  NoAdjacentDistrictPair,
  NegativePerimeter,
  ZeroVotesDistrict,
  RetryBudgetExhausted,
  ZeroVariance,
  SeriesTooShort,
  EmptyResult,
  EmptyInput,
  FitUndefined,
  TooLarge,
  IoError,
  InternalError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

enum class ErrorCategory { Config, Data, Runtime };

ErrorCategory error_category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by graph construction; carries the connected components found
/// (node ordinals, each component sorted ascending, components ordered by
/// their smallest member).
class DisconnectedGraphError : public Error {
 public:
  DisconnectedGraphError(std::vector<std::vector<std::size_t>> components);

  const std::vector<std::vector<std::size_t>>& components() const noexcept {
    return components_;
  }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace redistrict
