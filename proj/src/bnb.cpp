#include "kqkp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

#include "kqkp/relaxation.hpp"

namespace kqkp {

const char* to_string(NodeAction action) {
  switch (action) {
    case NodeAction::Branch: return "branch";
    case NodeAction::Prune: return "prune";
    case NodeAction::Leaf: return "leaf";
    case NodeAction::Infeasible: return "infeasible";
  }
  return "unknown";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

namespace {

class Enumerator {
 public:
  Enumerator(const Instance& inst, std::optional<Incumbent> incumbent, std::uint64_t* nodes)
      : inst_(inst), best_(std::move(incumbent)), nodes_(nodes) {
    const int n = inst.n;
    // lightest_[p][m]: sum of the m lightest weights among items p..n-1.
    lightest_.resize(static_cast<std::size_t>(n) + 1);
    for (int p = 0; p <= n; ++p) {
      std::vector<std::int64_t> tail(inst.weights.begin() + p, inst.weights.end());
      std::sort(tail.begin(), tail.end());
      auto& sums = lightest_[p];
      sums.assign(tail.size() + 1, 0);
      for (std::size_t m = 0; m < tail.size(); ++m) sums[m + 1] = sums[m] + tail[m];
    }
    x_.assign(static_cast<std::size_t>(n), 0);
    interaction_.assign(static_cast<std::size_t>(n), 0);
  }

  std::optional<Incumbent> run() {
    if (inst_.k >= 0 && inst_.k <= inst_.n) dfs(0, 0, 0, inst_.offset);
    return std::move(best_);
  }

 private:
  void dfs(int p, int count, std::int64_t weight, std::int64_t value) {
    if (nodes_) ++*nodes_;
    const int need = inst_.k - count;
    if (need == 0) {
      if (!best_ || value > best_->value) {
        Selection x(x_.begin(), x_.end());
        best_ = Incumbent{std::move(x), value, IncumbentSource::BranchLeaf};
      }
      return;
    }
    if (inst_.n - p < need) return;
    if (weight + lightest_[p][need] > inst_.capacity) return;

    if (weight + inst_.weights[p] <= inst_.capacity) {
      const std::int64_t gain = inst_.profit(p, p) + 2 * interaction_[p];
      x_[p] = 1;
      for (int l = p + 1; l < inst_.n; ++l) interaction_[l] += inst_.profit(l, p);
      dfs(p + 1, count + 1, weight + inst_.weights[p], value + gain);
      for (int l = p + 1; l < inst_.n; ++l) interaction_[l] -= inst_.profit(l, p);
      x_[p] = 0;
    }
    dfs(p + 1, count, weight, value);
  }

  const Instance& inst_;
  std::optional<Incumbent> best_;
  std::uint64_t* nodes_;
  std::vector<std::vector<std::int64_t>> lightest_;
  std::vector<std::uint8_t> x_;
  std::vector<std::int64_t> interaction_;
};

struct Node {
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int depth = 0;
  int fixed_var = -1;
  int fixed_value = -1;
  double bound = std::numeric_limits<double>::infinity();
  Instance reduced;
  // Root index of every item of `reduced`.
  std::vector<int> items;
  std::vector<int> fixed_ones;
};

struct NodeOrder {
  bool operator()(const Node& lhs, const Node& rhs) const {
    // priority_queue pops the largest element: highest bound, then deeper,
    // then older.
    if (lhs.bound != rhs.bound) return lhs.bound < rhs.bound;
    if (lhs.depth != rhs.depth) return lhs.depth < rhs.depth;
    return lhs.id > rhs.id;
  }
};

struct BoundResult {
  double bound = std::numeric_limits<double>::infinity();
  // Fractional point in the coordinates of the (unpadded) instance.
  std::optional<Eigen::VectorXd> x_frac;
  std::int64_t evals = 0;
};

// Relaxation bound for an instance with 2 <= k < n and k <= k_max.
BoundResult relaxation_bound(const Instance& inst, const SolverConfig& config, double lower,
                             int budget) {
  BoundResult out;
  const Instance padded = pad_degenerate(inst);
  const RelaxationData relax = build_relaxation(padded, preprocess(padded));
  Eigen::MatrixXd X;
  if (config.use_cuts) {
    BundleOptions options = config.bundle;
    options.max_evals = budget;
    const BundleResult result = minimize_dual(relax, lower, options);
    out.bound = result.bound;
    out.evals = result.evals;
    X = result.X_center;
  } else {
    IpmOptions options = config.bundle.ipm;
    options.tol = config.ipm_tol;
    SdpSolution sol = solve_sdp(relax, nullptr, options);
    out.bound = sol.certified_bound + relax.const_term;
    out.evals = 1;
    X = std::move(sol.X);
  }
  out.x_frac = extract_fractional(X, relax).head(inst.n);
  return out;
}

Selection lift(const Node& node, const Selection& local, int root_n) {
  Selection x(static_cast<std::size_t>(root_n), 0);
  for (int j : node.fixed_ones) x[j] = 1;
  for (std::size_t p = 0; p < node.items.size(); ++p) {
    if (local[p]) x[node.items[p]] = 1;
  }
  return x;
}

Node make_child(const Node& parent, int v, bool value, std::int64_t id) {
  Node child;
  child.id = id;
  child.parent = parent.id;
  child.depth = parent.depth + 1;
  child.fixed_var = parent.items[v];
  child.fixed_value = value ? 1 : 0;
  child.bound = parent.bound;
  child.reduced = fix_variable(parent.reduced, v, value);
  child.items = parent.items;
  child.items.erase(child.items.begin() + v);
  child.fixed_ones = parent.fixed_ones;
  if (value) child.fixed_ones.push_back(parent.items[v]);
  return child;
}

struct NodeOutcome {
  NodeAction action = NodeAction::Branch;
  double bound = 0.0;
  std::optional<Incumbent> candidate;
  std::vector<Node> children;
  std::int64_t evals = 0;
  std::uint64_t bnp_nodes = 0;
  bool root_bounded = false;
};

std::optional<std::int64_t> value_of(const std::optional<Incumbent>& inc) {
  if (!inc) return std::nullopt;
  return inc->value;
}

// Processes one node against a snapshot of the incumbent value. Child ids are
// assigned by the caller.
NodeOutcome process(const Node& node, std::optional<std::int64_t> incumbent, const Instance& root,
                    const SolverConfig& config) {
  NodeOutcome out;
  out.bound = node.bound;
  const double lower = incumbent ? static_cast<double>(*incumbent)
                                 : -std::numeric_limits<double>::infinity();
  if (incumbent && prunable(node.bound, lower)) {
    out.action = NodeAction::Prune;
    return out;
  }

  const Instance& inst = node.reduced;
  auto leaf = [&](const Selection& local) {
    out.action = NodeAction::Leaf;
    Selection x = lift(node, local, root.n);
    const auto value = objective(root, x);
    out.candidate = Incumbent{std::move(x), value, IncumbentSource::BranchLeaf};
    out.bound = std::min(out.bound, static_cast<double>(value));
  };

  if (inst.k == 0) {
    leaf(Selection(static_cast<std::size_t>(inst.n), 0));
    return out;
  }
  const Preprocessed prep = preprocess(inst);
  if (prep.status == PreprocessStatus::Infeasible) {
    out.action = NodeAction::Infeasible;
    return out;
  }
  if (inst.k <= config.bnp_node_k) {
    const auto found = branch_and_prune(inst, std::nullopt, &out.bnp_nodes);
    if (!found) {
      out.action = NodeAction::Infeasible;
      return out;
    }
    leaf(found->x);
    return out;
  }
  if (prep.status == PreprocessStatus::TrivialK1) {
    Selection local(static_cast<std::size_t>(inst.n), 0);
    local[prep.trivial_index] = 1;
    leaf(local);
    return out;
  }
  if (inst.k == inst.n) {
    leaf(Selection(static_cast<std::size_t>(inst.n), 1));
    return out;
  }

  Eigen::VectorXd x_frac = Eigen::VectorXd::Constant(inst.n, 0.5);
  try {
    const int budget = node.parent < 0 ? config.root_evals : config.node_evals;
    const BoundResult bound = relaxation_bound(inst, config, lower, budget);
    out.evals = bound.evals;
    out.bound = std::min(out.bound, bound.bound);
    out.root_bounded = true;
    if (bound.x_frac) x_frac = *bound.x_frac;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalBreakdown) throw;
    // Keep the inherited bound; the node is still branched.
  }
  if (incumbent && prunable(out.bound, lower)) {
    out.action = NodeAction::Prune;
    return out;
  }

  const auto local = varfix_heuristic(inst, prep, x_frac, std::nullopt);
  if (local) {
    Selection x = lift(node, local->x, root.n);
    const auto value = objective(root, x);
    if (!incumbent || value > *incumbent) {
      out.candidate = Incumbent{std::move(x), value, IncumbentSource::VarFix};
      if (prunable(out.bound, static_cast<double>(value))) {
        out.action = NodeAction::Prune;
        return out;
      }
    }
  }

  int v = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < inst.n; ++j) {
    const double dist = std::abs(0.5 - x_frac(j));
    if (dist < best) {
      best = dist;
      v = j;
    }
  }
  Node shaped = node;
  shaped.bound = out.bound;
  if (inst.n - 1 >= inst.k) out.children.push_back(make_child(shaped, v, false, 0));
  if (inst.weights[v] <= inst.capacity) out.children.push_back(make_child(shaped, v, true, 0));
  out.action = NodeAction::Branch;
  return out;
}

class Search {
 public:
  Search(const Instance& root, const SolverConfig& config, std::optional<Incumbent> incumbent,
         std::chrono::steady_clock::time_point start)
      : incumbent_(std::move(incumbent)), root_(root), config_(config), start_(start) {}

  void run(Node first) {
    first.id = next_id_++;
    queue_.push(std::move(first));
    const int threads = std::max(1, config_.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back([this] { worker(); });
      for (auto& th : pool) th.join();
    }
  }

  std::optional<Incumbent> incumbent_;
  std::int64_t nodes_ = 0;
  std::int64_t evals_ = 0;
  std::uint64_t bnp_nodes_ = 0;
  bool timed_out_ = false;
  std::optional<double> root_bound_;

 private:
  bool out_of_time() const {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    return elapsed.count() > config_.time_limit_s;
  }

  void worker() {
    std::unique_lock lock(mutex_);
    for (;;) {
      cv_.wait(lock, [&] { return !queue_.empty() || active_ == 0 || stop_; });
      if (stop_ || queue_.empty()) break;
      if (out_of_time()) {
        timed_out_ = true;
        stop_ = true;
        cv_.notify_all();
        break;
      }
      Node node = queue_.top();
      queue_.pop();
      ++active_;
      const auto snapshot = value_of(incumbent_);
      lock.unlock();

      NodeOutcome outcome = process(node, snapshot, root_, config_);

      lock.lock();
      --active_;
      ++nodes_;
      evals_ += outcome.evals;
      bnp_nodes_ += outcome.bnp_nodes;
      if (node.parent < 0 && outcome.root_bounded) root_bound_ = outcome.bound;
      if (outcome.candidate && (!incumbent_ || outcome.candidate->value > incumbent_->value)) {
        incumbent_ = std::move(outcome.candidate);
      }
      for (auto& child : outcome.children) {
        child.id = next_id_++;
        queue_.push(std::move(child));
      }
      if (config_.on_node) {
        NodeEvent event;
        event.id = node.id;
        event.parent = node.parent;
        event.depth = node.depth;
        event.fixed_var = node.fixed_var;
        event.fixed_value = node.fixed_value;
        event.bound = outcome.bound;
        event.incumbent = value_of(incumbent_);
        event.action = outcome.action;
        config_.on_node(event);
      }
      cv_.notify_all();
    }
  }

  const Instance& root_;
  const SolverConfig& config_;
  std::chrono::steady_clock::time_point start_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue_;
  std::mutex mutex_;
  std::condition_variable cv_;
  int active_ = 0;
  bool stop_ = false;
  std::int64_t next_id_ = 0;
};

void finish_report(SolveReport& report, std::chrono::steady_clock::time_point start) {
  report.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  if (report.best && report.best->value > 0) {
    report.root_gap_percent = 100.0 * (report.root_bound - static_cast<double>(report.best->value)) /
                              static_cast<double>(report.best->value);
  }
}

}  // namespace

std::optional<Incumbent> branch_and_prune(const Instance& inst, std::optional<Incumbent> incumbent,
                                          std::uint64_t* nodes) {
  return Enumerator(inst, std::move(incumbent), nodes).run();
}

RootBound compute_root_bound(const Instance& inst, const SolverConfig& config) {
  RootBound out;
  const Preprocessed prep = preprocess(inst);
  if (prep.status == PreprocessStatus::Infeasible) {
    out.bound = -std::numeric_limits<double>::infinity();
    return out;
  }
  if (inst.k == 0) {
    out.bound = static_cast<double>(inst.offset);
    return out;
  }
  if (prep.status == PreprocessStatus::TrivialK1) {
    out.bound = static_cast<double>(prep.trivial_value);
    return out;
  }
  if (inst.k == inst.n) {
    out.bound = static_cast<double>(objective(inst, Selection(static_cast<std::size_t>(inst.n), 1)));
    return out;
  }
  const BoundResult bound = relaxation_bound(inst, config, -std::numeric_limits<double>::infinity(),
                                             config.root_evals);
  out.bound = bound.bound;
  out.evals = bound.evals;
  return out;
}

SolveReport solve(const Instance& inst, const SolverConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.nodes = 1;
  const Preprocessed prep = preprocess(inst);

  auto emit_root = [&](NodeAction action) {
    if (!config.on_node) return;
    NodeEvent event;
    event.bound = report.root_bound;
    event.incumbent = value_of(report.best);
    event.action = action;
    config.on_node(event);
  };

  if (prep.status == PreprocessStatus::Infeasible) {
    report.root_bound = -std::numeric_limits<double>::infinity();
    emit_root(NodeAction::Infeasible);
    finish_report(report, start);
    return report;
  }
  if (prep.status == PreprocessStatus::TrivialK1 || inst.k == 0 || inst.k == inst.n) {
    Selection x(static_cast<std::size_t>(inst.n), 0);
    if (prep.status == PreprocessStatus::TrivialK1) x[prep.trivial_index] = 1;
    if (inst.k == inst.n) std::fill(x.begin(), x.end(), 1);
    const auto value = objective(inst, x);
    report.best = Incumbent{std::move(x), value, IncumbentSource::BranchLeaf};
    report.root_bound = static_cast<double>(value);
    emit_root(NodeAction::Leaf);
    finish_report(report, start);
    return report;
  }

  if (inst.k <= config.bnp_root_k) {
    report.best = branch_and_prune(inst, std::nullopt, &report.bnp_nodes);
    if (config.root_bound_for_bnp) {
      const RootBound root = compute_root_bound(inst, config);
      report.root_bound = root.bound;
      report.evals = root.evals;
    } else if (report.best) {
      report.root_bound = static_cast<double>(report.best->value);
    }
    emit_root(NodeAction::Leaf);
    finish_report(report, start);
    return report;
  }

  Search search(inst, config, primal_heuristic(inst, prep), start);
  Node root;
  root.reduced = inst;
  root.items.resize(static_cast<std::size_t>(inst.n));
  for (int j = 0; j < inst.n; ++j) root.items[j] = j;
  search.run(std::move(root));

  report.best = std::move(search.incumbent_);
  report.nodes = search.nodes_;
  report.evals = search.evals_;
  report.bnp_nodes = search.bnp_nodes_;
  report.status = search.timed_out_ ? SolveStatus::TimeLimit : SolveStatus::Optimal;
  if (search.root_bound_) {
    report.root_bound = *search.root_bound_;
  } else if (report.best) {
    report.root_bound = static_cast<double>(report.best->value);
  }
  finish_report(report, start);
  return report;
}

}  // namespace kqkp
