#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "kqkp/relaxation.hpp"

namespace kqkp {

enum class SdpStatus { Optimal, SlowProgress, IterLimit };

const char* to_string(SdpStatus status);

struct IpmOptions {
  // Relative duality gap |p - d| / (1 + |d|) required for Optimal.
  double tol = 1e-7;
  // Relative primal and dual infeasibility required for Optimal.
  double feas_tol = 1e-9;
  int max_iter = 100;
  double step_fraction = 0.98;
  // SlowProgress when the best of the last slow_window iterations does not
  // improve on everything before by 1%.
  int slow_window = 5;
  // Optional CSV log: iter,primal_obj,dual_obj,gap,alpha_p,alpha_d,pinf,dinf
  std::ostream* log = nullptr;
};

// Primal-dual pair
//   max <C,X>  s.t. diag(X) = e, <E,X> = r_E, <A,X> + s = r_A, X psd, s >= 0
//   min e'y[0:n] + r_E y[n] + r_A y[n+1]
//       s.t. Diag(y[0:n]) + y[n] E + y[n+1] A - Z = C, y[n+1] = t >= 0, Z psd
// with E = ee' and A = aa'.
struct SdpSolution {
  Eigen::MatrixXd X;
  double s = 0.0;
  Eigen::VectorXd y;
  Eigen::MatrixXd Z;
  double t = 0.0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  // Dual value corrected by n * max(0, -lambda_min(A'(y) - C)), capped by
  // n * max(0, lambda_max(C)); an upper bound on the primal optimum
  // regardless of convergence.
  double certified_bound = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::IterLimit;
  // (<X,Z> + st) per iteration, relative to 1 + max(|primal|, |dual|).
  std::vector<double> gap_history;
};

// Schur complement matrix M with m_ij = trace(Z^-1 A_j X A_i) for the
// constraint family { e_i e_i' (i < n), uu', vv' }, built in O(n^2) from
// Z^-1 and X by exploiting the rank-one structure. The s/t term of the
// slack variable is not included.
Eigen::MatrixXd assemble_schur(const Eigen::MatrixXd& Zinv, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Solves the relaxation; `cost_override` replaces data.cost when non-null.
// Starts from a structured point and, if that does not reach Optimal, once
// more from scaled identities; returns the Optimal or lower-bound run.
// Throws NumericalBreakdown if positive definiteness is lost before the first
// step; later breakdowns return the last iterate with status SlowProgress.
SdpSolution solve_sdp(const RelaxationData& data, const Eigen::MatrixXd* cost_override,
                      const IpmOptions& options = {});

// certified_bound + const_term.
double sdp_bound(const RelaxationData& data, const Eigen::MatrixXd* cost_override,
                 const IpmOptions& options = {});

}  // namespace kqkp
