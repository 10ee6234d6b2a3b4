#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace kqkp {

// Sign patterns of the triangle inequalities on (X_ij, X_ik, X_jk):
//   s1 X_ij + s2 X_ik + s3 X_jk >= -1.
enum class TriangleKind : std::uint8_t { PPP = 0, MMP = 1, MPM = 2, PMM = 3 };

struct TriangleCut {
  int i = 0;
  int j = 0;
  int k = 0;
  TriangleKind kind = TriangleKind::PPP;

  std::array<int, 3> signs() const;
  // s1 X_ij + s2 X_ik + s3 X_jk
  double signed_sum(const Eigen::MatrixXd& X) const;
  std::uint64_t key() const;

  auto operator<=>(const TriangleCut&) const = default;
};

// The cut in normalized form T_c(X) <= 1 has T_c(X) = -signed_sum(X).
struct CutPool {
  std::vector<TriangleCut> cuts;
  std::vector<double> gamma;
  std::size_t capacity = 0;

  std::size_t size() const { return cuts.size(); }
  bool contains(const TriangleCut& cut) const;
};

// e - T(X) per cut; negative entries are violated.
Eigen::VectorXd evaluate_cuts(const std::vector<TriangleCut>& cuts, const Eigen::MatrixXd& X);

// Scans all 4 C(n,3) inequalities and returns up to `count` cuts violated by
// more than `violation_tol`, most violated first, ties by (i, j, k, kind).
// Cuts already in `exclude` are skipped.
std::vector<TriangleCut> separate(const Eigen::MatrixXd& X, std::size_t count,
                                  const CutPool* exclude = nullptr,
                                  double violation_tol = 1e-4);

// T'(gamma): symmetric, zero diagonal, with <T'(gamma), X> = gamma' T(X).
Eigen::MatrixXd adjoint_apply(const std::vector<TriangleCut>& cuts,
                              const Eigen::VectorXd& gamma, Eigen::Index n);

// Drops cuts whose multiplier is below `gamma_drop`.
std::size_t remove_inactive(CutPool& pool, double gamma_drop);

// Appends new cuts with zero multiplier. If the pool would exceed its
// capacity, existing cuts with the smallest multipliers are evicted first.
void add_cuts(CutPool& pool, const std::vector<TriangleCut>& fresh);

}  // namespace kqkp
