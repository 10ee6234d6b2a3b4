#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

#include "kqkp/bundle.hpp"
#include "kqkp/heuristics.hpp"
#include "kqkp/instance.hpp"

namespace kqkp {

enum class NodeAction { Branch, Prune, Leaf, Infeasible };

const char* to_string(NodeAction action);

// One processed node of the search tree.
struct NodeEvent {
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int depth = 0;
  // Original index of the variable fixed when creating this node (-1 at the
  // root) and the value it was fixed to.
  int fixed_var = -1;
  int fixed_value = -1;
  double bound = 0.0;
  // Incumbent value after processing, or nullopt if none is known yet.
  std::optional<std::int64_t> incumbent;
  NodeAction action = NodeAction::Branch;
};

struct SolverConfig {
  double time_limit_s = 10800.0;
  // Relative gap for plain relaxation solves.
  double ipm_tol = 1e-7;
  // Bundle settings shared by all nodes; max_evals is overridden by the
  // root and node budgets below.
  BundleOptions bundle;
  int root_evals = 30;
  int node_evals = 10;
  // Subtrees with at most this many items left to choose are enumerated.
  int bnp_node_k = 5;
  // Instances with k at most this are solved by enumeration alone.
  int bnp_root_k = 10;
  // false: bound with the plain relaxation only (one IPM solve per node).
  bool use_cuts = true;
  int threads = 1;
  // Also compute the root bound when the root is delegated to enumeration,
  // so that root gaps can be reported.
  bool root_bound_for_bnp = true;
  std::function<void(const NodeEvent&)> on_node;
};

enum class SolveStatus { Optimal, TimeLimit };

const char* to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::Optimal;
  // Best solution in the indexing of the solved instance; empty when the
  // instance has no feasible selection.
  std::optional<Incumbent> best;
  double root_bound = 0.0;
  double root_gap_percent = 0.0;
  std::int64_t nodes = 0;
  std::uint64_t bnp_nodes = 0;
  std::int64_t time_ms = 0;
  std::int64_t evals = 0;
};

// Exhaustive depth-first enumeration in index order, x_j = 1 before x_j = 0,
// pruning only on cardinality and on capacity (current weight plus the
// lightest possible completion). Returns the better of the best completion
// and `incumbent`. `nodes`, if given, is incremented per visited node.
std::optional<Incumbent> branch_and_prune(const Instance& inst,
                                          std::optional<Incumbent> incumbent = std::nullopt,
                                          std::uint64_t* nodes = nullptr);

// Root bound only: plain relaxation (use_cuts = false) or bundle bound.
struct RootBound {
  double bound = 0.0;
  std::int64_t evals = 0;
};
RootBound compute_root_bound(const Instance& inst, const SolverConfig& config);

// Best-first branch and bound on the relaxation bounds. Expects a validated
// instance.
SolveReport solve(const Instance& inst, const SolverConfig& config = {});

}  // namespace kqkp
