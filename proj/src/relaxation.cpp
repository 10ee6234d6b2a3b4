#include "kqkp/relaxation.hpp"

#include <algorithm>
#include <numeric>

namespace kqkp {

RelaxationData build_relaxation(const Instance& inst, const Preprocessed& prep) {
  const int n = inst.n;
  const int k = inst.k;
  if (2 * k == n) {
    throw Error(ErrorCode::DegenerateCardinality, "relaxation undefined for n == 2k");
  }
  if (k < 1 || k > prep.k_max) {
    throw Error(ErrorCode::CardinalityMismatch, "relaxation requires 1 <= k <= k_max");
  }

  RelaxationData data;
  data.dim = n;
  data.proj_scale = 1.0 / static_cast<double>(2 * k - n);

  Eigen::MatrixXd profits(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) profits(i, j) = static_cast<double>(inst.profit(i, j));
  }

  // With x = (y + e)/2:  x'Cx = 1/4 (e'Ce + 2 (Ce)'y + y'Cy). The lifted
  // cost is 1/4 [[0, (Ce)'], [Ce, C]] against (1;y)(1;y)', the constant
  // 1/4 e'Ce is carried separately. Projecting with V = [p e'; I] gives
  // V' C~ V = 1/4 (C + p (e c' + c e')) where c = Ce and p = 1/(2k-n).
  const Eigen::VectorXd row_sums = profits.rowwise().sum();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  data.cost = 0.25 * (profits + data.proj_scale * (ones * row_sums.transpose() +
                                                    row_sums * ones.transpose()));
  data.const_term = 0.25 * row_sums.sum() + static_cast<double>(inst.offset);

  const double total_weight = static_cast<double>(
      std::accumulate(inst.weights.begin(), inst.weights.end(), std::int64_t{0}));
  const double b = static_cast<double>(inst.capacity);
  const double b_prime = static_cast<double>(prep.b_prime);
  const double shift = (total_weight - (b + b_prime)) * data.proj_scale;
  data.cap_vector.resize(n);
  for (int j = 0; j < n; ++j) data.cap_vector(j) = shift + static_cast<double>(inst.weights[j]);

  const double card = static_cast<double>(2 * k - n);
  data.rhs_card = card * card;
  data.rhs_cap = (b - b_prime) * (b - b_prime);
  return data;
}

Instance pad_degenerate(const Instance& inst) {
  if (2 * inst.k != inst.n) return inst;
  Instance out;
  out.n = inst.n + 1;
  out.k = inst.k;
  out.capacity = inst.capacity;
  out.offset = inst.offset;
  out.weights = inst.weights;
  out.weights.push_back(inst.capacity + 1);
  out.profits.assign(static_cast<std::size_t>(out.n) * out.n, 0);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) out.profit(i, j) = inst.profit(i, j);
  }
  return out;
}

Eigen::MatrixXd feasible_X_from_binary(std::span<const std::uint8_t> x, int k) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd y(n);
  int count = 0;
  for (int j = 0; j < n; ++j) {
    count += x[j] ? 1 : 0;
    y(j) = x[j] ? 1.0 : -1.0;
  }
  if (count != k) {
    throw Error(ErrorCode::CardinalityMismatch,
                "selection has " + std::to_string(count) + " items, expected " + std::to_string(k));
  }
  return y * y.transpose();
}

Eigen::VectorXd extract_fractional(const Eigen::MatrixXd& X, const RelaxationData& data) {
  const Eigen::VectorXd y = data.proj_scale * X.rowwise().sum();
  return ((y.array() + 1.0) * 0.5).max(0.0).min(1.0).matrix();
}

}  // namespace kqkp
