#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "kqkp/error.hpp"

namespace kqkp {

// Binary item selection, one entry (0 or 1) per item.
using Selection = std::vector<std::uint8_t>;

// Data of a 0-1 k-item quadratic knapsack problem:
//
//   max  x'Cx + offset   s.t.  a'x <= b,  e'x = k,  x binary.
//
// Profits are stored row-major. `offset` collects the constant produced by
// fixing variables to one; it is zero for instances read from disk.
struct Instance {
  int n = 0;
  int k = 0;
  std::int64_t capacity = 0;
  std::vector<std::int64_t> weights;
  std::vector<std::int64_t> profits;
  std::int64_t offset = 0;

  std::int64_t profit(int i, int j) const {
    return profits[static_cast<std::size_t>(i) * n + j];
  }
  std::int64_t& profit(int i, int j) {
    return profits[static_cast<std::size_t>(i) * n + j];
  }
};

enum class ValidationLevel {
  // Nonnegativity, symmetry and max a_j <= b < sum a_j.
  Root,
  // Nonnegativity and symmetry only. Reduced instances created by fixing
  // may carry items heavier than the residual capacity.
  Subproblem,
};

// Checks the instance invariants. With `symmetrize` an asymmetric C is
// replaced by (C + C')/2, which must then be integral.
Instance validate(Instance raw, ValidationLevel level = ValidationLevel::Root,
                  bool symmetrize = false);

enum class PreprocessStatus { Solvable, TrivialK1, Infeasible };

struct Preprocessed {
  int k_max = 0;
  // Sum of the k smallest weights (sum of all weights when k > n).
  std::int64_t b_prime = 0;
  PreprocessStatus status = PreprocessStatus::Solvable;
  // Populated for TrivialK1: objective value including the offset and the
  // item achieving it.
  std::int64_t trivial_value = 0;
  int trivial_index = -1;
};

Preprocessed preprocess(const Instance& inst);

// Removes item j from the instance. Fixing to one moves its profit into the
// offset and folds the interaction terms into the diagonal of the survivors.
Instance fix_variable(const Instance& inst, int j, bool value);

// x'Cx, excluding the offset.
std::int64_t quadratic_value(const Instance& inst, std::span<const std::uint8_t> x);
// x'Cx + offset.
std::int64_t objective(const Instance& inst, std::span<const std::uint8_t> x);
bool is_feasible(const Instance& inst, std::span<const std::uint8_t> x);

// Plain text instance format:
//   n k b
//   a_1 ... a_n
//   n rows of C
// Lines starting with '#' and blank lines are ignored. Parse errors carry
// ErrorCode::Parse and name the offending line.
Instance read_instance(std::istream& in);
Instance read_instance_file(const std::filesystem::path& path);
void write_instance(std::ostream& out, const Instance& inst);

}  // namespace kqkp
