#pragma once

#include <Eigen/Dense>

#include "kqkp/instance.hpp"

namespace kqkp {

// Data of the projected semidefinite relaxation
//
//   max <C, X>  s.t.  diag(X) = e,  <ee', X> = (2k-n)^2,
//                     <aa', X> <= (b-b')^2,  X psd,
//
// obtained from the +-1 reformulation y = 2x - e after eliminating the
// homogenizing coordinate. For every feasible binary x,
// <cost, (2x-e)(2x-e)'> + const_term equals the objective including offset.
struct RelaxationData {
  int dim = 0;
  Eigen::MatrixXd cost;
  Eigen::VectorXd cap_vector;
  double rhs_card = 0.0;
  double rhs_cap = 0.0;
  double const_term = 0.0;
  // 1 / (2k - n); maps X back to the homogenizing row of the lifted matrix.
  double proj_scale = 0.0;
};

// Throws DegenerateCardinality when n == 2k. Requires 1 <= k <= k_max.
RelaxationData build_relaxation(const Instance& inst, const Preprocessed& prep);

// Appends an unselectable zero-profit item (weight b+1) when n == 2k so the
// relaxation is well defined; returns the instance unchanged otherwise.
Instance pad_degenerate(const Instance& inst);

// X = yy' with y = 2x - e. Throws CardinalityMismatch when e'x != k.
Eigen::MatrixXd feasible_X_from_binary(std::span<const std::uint8_t> x, int k);

// Reads y off the first row of V X V' and maps it to [0,1]^n.
Eigen::VectorXd extract_fractional(const Eigen::MatrixXd& X, const RelaxationData& data);

}  // namespace kqkp
