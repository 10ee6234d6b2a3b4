#include "kqkp/cuts.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace kqkp {

std::array<int, 3> TriangleCut::signs() const {
  switch (kind) {
    case TriangleKind::PPP: return {1, 1, 1};
    case TriangleKind::MMP: return {-1, -1, 1};
    case TriangleKind::MPM: return {-1, 1, -1};
    case TriangleKind::PMM: return {1, -1, -1};
  }
  return {1, 1, 1};
}

double TriangleCut::signed_sum(const Eigen::MatrixXd& X) const {
  const auto s = signs();
  return s[0] * X(i, j) + s[1] * X(i, k) + s[2] * X(j, k);
}

std::uint64_t TriangleCut::key() const {
  return (static_cast<std::uint64_t>(i) << 44) | (static_cast<std::uint64_t>(j) << 24) |
         (static_cast<std::uint64_t>(k) << 4) | static_cast<std::uint64_t>(kind);
}

bool CutPool::contains(const TriangleCut& cut) const {
  return std::find(cuts.begin(), cuts.end(), cut) != cuts.end();
}

Eigen::VectorXd evaluate_cuts(const std::vector<TriangleCut>& cuts, const Eigen::MatrixXd& X) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(cuts.size()));
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    out(static_cast<Eigen::Index>(c)) = 1.0 + cuts[c].signed_sum(X);
  }
  return out;
}

std::vector<TriangleCut> separate(const Eigen::MatrixXd& X, std::size_t count,
                                  const CutPool* exclude, double violation_tol) {
  std::unordered_set<std::uint64_t> known;
  if (exclude) {
    for (const auto& cut : exclude->cuts) known.insert(cut.key());
  }

  struct Candidate {
    double violation;
    TriangleCut cut;
  };
  std::vector<Candidate> found;
  const int n = static_cast<int>(X.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double xij = X(i, j);
      for (int k = j + 1; k < n; ++k) {
        const double xik = X(i, k);
        const double xjk = X(j, k);
        const double sums[4] = {xij + xik + xjk, -xij - xik + xjk, -xij + xik - xjk,
                                xij - xik - xjk};
        for (int s = 0; s < 4; ++s) {
          const double violation = -1.0 - sums[s];
          if (violation <= violation_tol) continue;
          TriangleCut cut{i, j, k, static_cast<TriangleKind>(s)};
          if (!known.empty() && known.count(cut.key())) continue;
          found.push_back({violation, cut});
        }
      }
    }
  }

  auto order = [](const Candidate& lhs, const Candidate& rhs) {
    if (lhs.violation != rhs.violation) return lhs.violation > rhs.violation;
    return lhs.cut < rhs.cut;
  };
  const std::size_t keep = std::min(count, found.size());
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(keep), found.end(),
                    order);
  std::vector<TriangleCut> out;
  out.reserve(keep);
  for (std::size_t c = 0; c < keep; ++c) out.push_back(found[c].cut);
  return out;
}

Eigen::MatrixXd adjoint_apply(const std::vector<TriangleCut>& cuts,
                              const Eigen::VectorXd& gamma, Eigen::Index n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const double g = gamma(static_cast<Eigen::Index>(c));
    if (g == 0.0) continue;
    const auto& cut = cuts[c];
    const auto s = cut.signs();
    // T_c(X) = -(s1 X_ij + s2 X_ik + s3 X_jk), split over both triangles.
    const double h = -0.5 * g;
    out(cut.i, cut.j) += h * s[0];
    out(cut.j, cut.i) += h * s[0];
    out(cut.i, cut.k) += h * s[1];
    out(cut.k, cut.i) += h * s[1];
    out(cut.j, cut.k) += h * s[2];
    out(cut.k, cut.j) += h * s[2];
  }
  return out;
}

std::size_t remove_inactive(CutPool& pool, double gamma_drop) {
  std::size_t write = 0;
  for (std::size_t c = 0; c < pool.cuts.size(); ++c) {
    if (pool.gamma[c] < gamma_drop) continue;
    pool.cuts[write] = pool.cuts[c];
    pool.gamma[write] = pool.gamma[c];
    ++write;
  }
  const std::size_t removed = pool.cuts.size() - write;
  pool.cuts.resize(write);
  pool.gamma.resize(write);
  return removed;
}

void add_cuts(CutPool& pool, const std::vector<TriangleCut>& fresh) {
  std::vector<TriangleCut> incoming;
  for (const auto& cut : fresh) {
    if (!pool.contains(cut) &&
        std::find(incoming.begin(), incoming.end(), cut) == incoming.end()) {
      incoming.push_back(cut);
    }
  }
  if (pool.capacity > 0 && pool.size() + incoming.size() > pool.capacity) {
    if (incoming.size() > pool.capacity) incoming.resize(pool.capacity);
    const std::size_t keep_old = pool.capacity - incoming.size();
    if (pool.size() > keep_old) {
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return pool.gamma[a] > pool.gamma[b];
      });
      idx.resize(keep_old);
      std::sort(idx.begin(), idx.end());
      CutPool kept;
      kept.capacity = pool.capacity;
      for (auto c : idx) {
        kept.cuts.push_back(pool.cuts[c]);
        kept.gamma.push_back(pool.gamma[c]);
      }
      pool = std::move(kept);
    }
  }
  for (const auto& cut : incoming) {
    pool.cuts.push_back(cut);
    pool.gamma.push_back(0.0);
  }
}

}  // namespace kqkp
