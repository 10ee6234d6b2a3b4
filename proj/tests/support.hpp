#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kqkp/generator.hpp"
#include "kqkp/instance.hpp"

namespace kqkp::test {

inline Instance make_instance(int k, std::int64_t b, std::vector<std::int64_t> a,
                              std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  Instance inst;
  inst.n = static_cast<int>(a.size());
  inst.k = k;
  inst.capacity = b;
  inst.weights = std::move(a);
  for (const auto& row : rows) inst.profits.insert(inst.profits.end(), row.begin(), row.end());
  return inst;
}

// Independent brute force over all 2^n vectors, objective summed entry by
// entry. Kept deliberately different from the library oracle.
struct Brute {
  std::optional<std::int64_t> value;
  std::uint64_t feasible = 0;
};

inline Brute brute_force(const Instance& inst) {
  Brute out;
  for (std::uint32_t mask = 0; mask < (1u << inst.n); ++mask) {
    if (std::popcount(mask) != inst.k) continue;
    std::int64_t weight = 0;
    for (int i = 0; i < inst.n; ++i) {
      if (mask >> i & 1u) weight += inst.weights[i];
    }
    if (weight > inst.capacity) continue;
    ++out.feasible;
    std::int64_t value = inst.offset;
    for (int i = 0; i < inst.n; ++i) {
      for (int j = 0; j < inst.n; ++j) {
        if ((mask >> i & 1u) && (mask >> j & 1u)) value += inst.profit(i, j);
      }
    }
    if (!out.value || value > *out.value) out.value = value;
  }
  return out;
}

// Fixed seeded suite: n in 8..16, all four densities, 200 instances.
inline std::vector<GenSpec> small_suite(int count = 200) {
  std::vector<GenSpec> specs;
  for (int idx = 0; idx < count; ++idx) {
    GenSpec g;
    g.n = 8 + idx % 9;
    g.density_percent = 25 * (1 + (idx / 9) % 4);
    g.seed = 1000 + static_cast<std::uint64_t>(idx);
    specs.push_back(g);
  }
  return specs;
}

inline GenSpec spec(int n, int density, std::uint64_t seed) {
  GenSpec g;
  g.n = n;
  g.density_percent = density;
  g.seed = seed;
  return g;
}

inline Eigen::MatrixXd random_pd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
  }
  return G * G.transpose() / n + Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Schur matrix straight from m_ij = trace(Z^-1 A_j X A_i) with every A_i
// formed as a dense matrix. The products Z^-1 A_j and X A_i are formed
// once; each entry is then the trace of their product.
inline Eigen::MatrixXd naive_schur(const Eigen::MatrixXd& Zinv, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(X.rows());
  std::vector<Eigen::MatrixXd> A;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd Ei = Eigen::MatrixXd::Zero(n, n);
    Ei(i, i) = 1.0;
    A.push_back(Ei);
  }
  A.push_back(u * u.transpose());
  A.push_back(v * v.transpose());
  const int m = n + 2;
  std::vector<Eigen::MatrixXd> left, right;
  for (const auto& Ai : A) {
    left.push_back(Zinv * Ai);
    right.push_back(X * Ai);
  }
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      // trace(P Q) = sum_ab P_ab Q_ba
      M(i, j) = left[j].cwiseProduct(right[i].transpose()).sum();
    }
  }
  return M;
}

}  // namespace kqkp::test
