#pragma once

#include <cstdint>
#include <optional>

#include "kqkp/instance.hpp"

namespace kqkp {

struct OracleResult {
  // Empty when no feasible selection exists.
  std::optional<std::int64_t> value;
  Selection argmax;
  std::uint64_t feasible_count = 0;
};

inline constexpr int kOracleMaxItems = 24;

// Exhaustive enumeration of all k-subsets in lexicographic order; the first
// maximizer found is kept. Values include the instance offset.
// Throws TooLarge for n > 24.
OracleResult enumerate(const Instance& inst);

}  // namespace kqkp
