#include "redistrict/error.hpp"

#include <sstream>

namespace redistrict {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownConfigKey: return "UnknownConfigKey";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::DuplicatePrecinctId: return "DuplicatePrecinctId";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::MissingVoteColumn: return "MissingVoteColumn";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MissingPrecinct: return "MissingPrecinct";
    case ErrorCode::UnknownPrecinct: return "UnknownPrecinct";
    case ErrorCode::UnknownContest: return "UnknownContest";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::InvalidSeedPlan: return "InvalidSeedPlan";
    case ErrorCode::DisconnectedSubset: return "DisconnectedSubset";
    case ErrorCode::NoAdjacentDistrictPair: return "NoAdjacentDistrictPair";
    case ErrorCode::NegativePerimeter: return "NegativePerimeter";
    case ErrorCode::ZeroVotesDistrict: return "ZeroVotesDistrict";
    case ErrorCode::RetryBudgetExhausted: return "RetryBudgetExhausted";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::FitUndefined: return "FitUndefined";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownConfigKey:
      return ErrorCategory::Config;
    case ErrorCode::DisconnectedGraph:
    case ErrorCode::DuplicatePrecinctId:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::DanglingEdge:
    case ErrorCode::InvalidNode:
    case ErrorCode::InvalidEdge:
    case ErrorCode::MissingVoteColumn:
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumericValue:
    case ErrorCode::EmptyFile:
    case ErrorCode::MissingPrecinct:
    case ErrorCode::UnknownPrecinct:
    case ErrorCode::UnknownContest:
    case ErrorCode::InvalidPlan:
    case ErrorCode::InvalidSeedPlan:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Runtime;
  }
}

namespace {

std::string describe_components(const std::vector<std::vector<std::size_t>>& components) {
  std::ostringstream os;
  os << "graph has " << components.size() << " connected components:";
  for (const auto& c : components) {
    os << " {";
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i > 0) os << ",";
      os << c[i];
    }
    os << "}";
  }
  return os.str();
}

}  // namespace

DisconnectedGraphError::DisconnectedGraphError(
    std::vector<std::vector<std::size_t>> components)
    : Error(ErrorCode::DisconnectedGraph, describe_components(components)),
      components_(std::move(components)) {}

}  // namespace redistrict
