#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "kqkp/cuts.hpp"
#include "kqkp/ipm.hpp"
#include "kqkp/relaxation.hpp"

namespace kqkp {

struct BundleOptions {
  // Oracle evaluations (IPM solves) allowed per call.
  int max_evals = 30;
  // Fraction of the predicted decrease required for a descent step.
  double descent_param = 0.1;
  double prox_init = 1.0;
  double prox_min = 1e-4;
  double prox_max = 1e4;
  std::size_t max_bundle = 25;
  double gamma_drop = 1e-5;
  // Pool update every this many descent steps (and once after the first
  // evaluation).
  int update_period = 5;
  // 0 selects min(5n, 300).
  std::size_t cuts_per_update = 0;
  // 0 selects 10n.
  std::size_t pool_capacity = 0;
  double violation_tol = 1e-4;
  // Stop when the predicted decrease drops below stall_tol * (1 + |f|).
  double stall_tol = 1e-5;
  IpmOptions ipm{.tol = 1e-5};
  // Optional CSV trace: eval,f,cuts,step
  std::ostream* trace = nullptr;
};

struct OracleValue {
  // e'gamma + <C - T'(gamma), X*> + const_term
  double value = 0.0;
  // Same with the IPM's certified dual bound in place of the primal value;
  // always a valid upper bound.
  double upper = 0.0;
  // e - T(X*) over the pool.
  Eigen::VectorXd subgradient;
  Eigen::MatrixXd X;
  SdpStatus status = SdpStatus::Optimal;
};

// Evaluates the dual functional
//   f(gamma) = e'gamma + max_{X in SDP feasible set} <C - T'(gamma), X>
// for multipliers on the cuts of `pool`. Requires gamma >= 0.
OracleValue oracle_eval(const CutPool& pool, const Eigen::VectorXd& gamma,
                        const RelaxationData& relax, const IpmOptions& ipm = {});

enum class BundleStop { Prune, Stall, Budget };

const char* to_string(BundleStop stop);

struct BundleResult {
  // Smallest certified value seen; a valid upper bound.
  double bound = std::numeric_limits<double>::infinity();
  // Certified value at gamma = 0, i.e. the plain relaxation bound.
  double sdp_bound = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd X_last;
  // Maximizer at the final stability center.
  Eigen::MatrixXd X_center;
  CutPool pool;
  int evals = 0;
  int descent_steps = 0;
  int null_steps = 0;
  BundleStop reason = BundleStop::Budget;
  // Center value after every descent step.
  std::vector<double> center_values;
  // Certified value of every evaluation, in order.
  std::vector<double> evaluated_bounds;
};

// Proximal bundle minimization of f over gamma >= 0 with a dynamic
// triangle-cut pool. Stops as soon as the bound drops below
// lower_bound + 1 (integral objective), when the model predicts no further
// progress, or when the evaluation budget is used up.
BundleResult minimize_dual(const RelaxationData& relax,
                           double lower_bound = -std::numeric_limits<double>::infinity(),
                           const BundleOptions& options = {});

// True when `bound` proves that no solution beats `incumbent` by at least
// one unit. Accounts for floating point noise in the bound.
bool prunable(double bound, double incumbent);

}  // namespace kqkp
