#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "kqkp/instance.hpp"

namespace kqkp {

enum class IncumbentSource { Primal, VarFix, BranchLeaf };

const char* to_string(IncumbentSource source);

struct Incumbent {
  Selection x;
  // Objective including the instance offset.
  std::int64_t value = 0;
  IncumbentSource source = IncumbentSource::Primal;
};

// Greedy by objective gain per unit weight, restricted to items that keep a
// k-completion within capacity, followed by improve(). Empty only when
// k > k_max.
std::optional<Incumbent> primal_heuristic(const Instance& inst, const Preprocessed& prep);

// Fill-up while fewer than k items are selected, then first-improvement
// 1-out/1-in exchanges in index order until none improves. `x` must be
// within capacity with at most k items.
void improve(const Instance& inst, Selection& x);

// Repeatedly fixes items with x_frac below eps to zero, runs the primal
// heuristic on the rest and improves the lifted solution on the full
// instance, for eps = 0.1, 0.2, ..., 0.9 or until fewer than k items remain.
// Returns the best of these and `incumbent`; if neither exists, the primal
// heuristic on the full instance.
std::optional<Incumbent> varfix_heuristic(const Instance& inst, const Preprocessed& prep,
                                          const Eigen::VectorXd& x_frac,
                                          std::optional<Incumbent> incumbent);

// Sub-instance on the listed items (in the given order); everything else is
// fixed to zero.
Instance restrict_items(const Instance& inst, std::span<const int> keep);

}  // namespace kqkp
