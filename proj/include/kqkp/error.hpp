#pragma once

#include <stdexcept>
#include <string>

namespace kqkp {

enum class ErrorCode {
  NonSymmetric,
  NegativeData,
  CapacityOutOfRange,
  InfeasibleFix,
  DegenerateCardinality,
  CardinalityMismatch,
  NumericalBreakdown,
  IterLimit,
  TooLarge,
  Parse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kqkp
