#include "kqkp/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace kqkp {

const char* to_string(IncumbentSource source) {
  switch (source) {
    case IncumbentSource::Primal: return "Primal";
    case IncumbentSource::VarFix: return "VarFix";
    case IncumbentSource::BranchLeaf: return "BranchLeaf";
  }
  return "Unknown";
}

Instance restrict_items(const Instance& inst, std::span<const int> keep) {
  Instance out;
  out.n = static_cast<int>(keep.size());
  out.k = inst.k;
  out.capacity = inst.capacity;
  out.offset = inst.offset;
  out.weights.reserve(keep.size());
  out.profits.reserve(keep.size() * keep.size());
  for (int i : keep) {
    out.weights.push_back(inst.weights[i]);
    for (int j : keep) out.profits.push_back(inst.profit(i, j));
  }
  return out;
}

namespace {

// Objective gain of adding item j: c_jj + 2 sum_{l in S} c_jl, where
// `interaction[j]` holds sum_{l in S} c_jl.
std::int64_t add_gain(const Instance& inst, const std::vector<std::int64_t>& interaction, int j) {
  return inst.profit(j, j) + 2 * interaction[j];
}

void update_interaction(const Instance& inst, std::vector<std::int64_t>& interaction, int j,
                        int sign) {
  for (int l = 0; l < inst.n; ++l) interaction[l] += sign * inst.profit(l, j);
}

// True if (gain_a, weight_a) has a strictly better gain/weight ratio than
// (gain_b, weight_b). Zero weight counts as an infinite ratio.
bool better_ratio(std::int64_t gain_a, std::int64_t weight_a, std::int64_t gain_b,
                  std::int64_t weight_b) {
  if (weight_a == 0 || weight_b == 0) {
    if (weight_a != 0) return false;
    if (weight_b != 0) return true;
    return gain_a > gain_b;
  }
  // gain_a / weight_a > gain_b / weight_b with positive weights.
  return static_cast<__int128>(gain_a) * weight_b > static_cast<__int128>(gain_b) * weight_a;
}

// Adds items by best ratio until k are selected, keeping a completion with
// the lightest remaining items within capacity.
bool fill_up(const Instance& inst, Selection& x, std::vector<std::int64_t>& interaction,
             std::int64_t& weight, int& count) {
  while (count < inst.k) {
    std::vector<int> remaining;
    for (int j = 0; j < inst.n; ++j) {
      if (!x[j]) remaining.push_back(j);
    }
    std::stable_sort(remaining.begin(), remaining.end(),
                     [&](int l, int r) { return inst.weights[l] < inst.weights[r]; });
    std::vector<int> rank(static_cast<std::size_t>(inst.n), -1);
    std::vector<std::int64_t> prefix(remaining.size() + 1, 0);
    for (std::size_t p = 0; p < remaining.size(); ++p) {
      rank[remaining[p]] = static_cast<int>(p);
      prefix[p + 1] = prefix[p] + inst.weights[remaining[p]];
    }
    const auto need_after = static_cast<std::size_t>(inst.k - count - 1);
    if (need_after + 1 > remaining.size()) return false;

    int best = -1;
    std::int64_t best_gain = 0;
    for (int j = 0; j < inst.n; ++j) {
      if (x[j]) continue;
      const auto r = static_cast<std::size_t>(rank[j]);
      const std::int64_t completion =
          r < need_after ? prefix[need_after + 1] - inst.weights[j] : prefix[need_after];
      if (weight + inst.weights[j] + completion > inst.capacity) continue;
      const auto gain = add_gain(inst, interaction, j);
      if (best < 0 || better_ratio(gain, inst.weights[j], best_gain, inst.weights[best])) {
        best = j;
        best_gain = gain;
      }
    }
    if (best < 0) return false;
    x[best] = 1;
    weight += inst.weights[best];
    ++count;
    update_interaction(inst, interaction, best, 1);
  }
  return true;
}

bool exchange_pass(const Instance& inst, Selection& x, std::vector<std::int64_t>& interaction,
                   std::int64_t& weight) {
  for (int i = 0; i < inst.n; ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < inst.n; ++j) {
      if (x[j]) continue;
      if (weight - inst.weights[i] + inst.weights[j] > inst.capacity) continue;
      const std::int64_t delta = inst.profit(j, j) + inst.profit(i, i) + 2 * interaction[j] -
                                 2 * inst.profit(i, j) - 2 * interaction[i];
      if (delta <= 0) continue;
      x[i] = 0;
      x[j] = 1;
      weight += inst.weights[j] - inst.weights[i];
      update_interaction(inst, interaction, i, -1);
      update_interaction(inst, interaction, j, 1);
      return true;
    }
  }
  return false;
}

}  // namespace

void improve(const Instance& inst, Selection& x) {
  std::vector<std::int64_t> interaction(static_cast<std::size_t>(inst.n), 0);
  std::int64_t weight = 0;
  int count = 0;
  for (int j = 0; j < inst.n; ++j) {
    if (!x[j]) continue;
    weight += inst.weights[j];
    ++count;
    update_interaction(inst, interaction, j, 1);
  }
  fill_up(inst, x, interaction, weight, count);
  while (exchange_pass(inst, x, interaction, weight)) {
  }
}

std::optional<Incumbent> primal_heuristic(const Instance& inst, const Preprocessed& prep) {
  if (inst.k > prep.k_max || inst.k > inst.n) return std::nullopt;

  Selection x(static_cast<std::size_t>(inst.n), 0);
  std::vector<std::int64_t> interaction(static_cast<std::size_t>(inst.n), 0);
  std::int64_t weight = 0;
  int count = 0;
  if (!fill_up(inst, x, interaction, weight, count)) {
    // Repair: the k lightest items always fit when k <= k_max.
    std::vector<int> order(static_cast<std::size_t>(inst.n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int l, int r) { return inst.weights[l] < inst.weights[r]; });
    std::fill(x.begin(), x.end(), 0);
    for (int p = 0; p < inst.k; ++p) x[order[p]] = 1;
  }
  improve(inst, x);
  if (!is_feasible(inst, x)) return std::nullopt;
  return Incumbent{x, objective(inst, x), IncumbentSource::Primal};
}

std::optional<Incumbent> varfix_heuristic(const Instance& inst, const Preprocessed& prep,
                                          const Eigen::VectorXd& x_frac,
                                          std::optional<Incumbent> incumbent) {
  if (inst.k > prep.k_max) return incumbent;
  for (int step = 1; step <= 9; ++step) {
    const double eps = 0.1 * step;
    std::vector<int> keep;
    for (int j = 0; j < inst.n; ++j) {
      if (x_frac(j) >= eps) keep.push_back(j);
    }
    if (static_cast<int>(keep.size()) < inst.k) break;

    const Instance reduced = restrict_items(inst, keep);
    const Preprocessed reduced_prep = preprocess(reduced);
    if (reduced_prep.status == PreprocessStatus::Infeasible) break;
    const auto local = primal_heuristic(reduced, reduced_prep);
    if (!local) break;

    Selection x(static_cast<std::size_t>(inst.n), 0);
    for (std::size_t p = 0; p < keep.size(); ++p) x[keep[p]] = local->x[p];
    improve(inst, x);
    if (!is_feasible(inst, x)) continue;
    const auto value = objective(inst, x);
    if (!incumbent || value > incumbent->value) {
      incumbent = Incumbent{std::move(x), value, IncumbentSource::VarFix};
    }
  }
  // Even the items above 0.1 may not admit a feasible k-subset; fall back
  // to the unreduced problem.
  if (!incumbent) {
    incumbent = primal_heuristic(inst, prep);
    if (incumbent) incumbent->source = IncumbentSource::VarFix;
  }
  return incumbent;
}

}  // namespace kqkp
