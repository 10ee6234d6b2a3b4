#include "kqkp/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace kqkp {

const char* to_string(BundleStop stop) {
  switch (stop) {
    case BundleStop::Prune: return "Prune";
    case BundleStop::Stall: return "Stall";
    case BundleStop::Budget: return "Budget";
  }
  return "Unknown";
}

bool prunable(double bound, double incumbent) {
  const double eps = 1e-7 + 1e-9 * std::max(1.0, std::abs(bound));
  return bound < incumbent + 1.0 - eps;
}

OracleValue oracle_eval(const CutPool& pool, const Eigen::VectorXd& gamma,
                        const RelaxationData& relax, const IpmOptions& ipm) {
  const Eigen::MatrixXd cost = relax.cost - adjoint_apply(pool.cuts, gamma, relax.dim);
  SdpSolution sol = solve_sdp(relax, &cost, ipm);
  OracleValue out;
  const double linear = gamma.sum();
  out.value = linear + sol.primal_obj + relax.const_term;
  out.upper = linear + sol.certified_bound + relax.const_term;
  out.subgradient = evaluate_cuts(pool.cuts, sol.X);
  out.status = sol.status;
  out.X = std::move(sol.X);
  return out;
}

namespace {

// A bundle element stores the maximizer X_i; its linearization
//   l_i(gamma) = <C, X_i> + const + gamma'(e - T(X_i))
// minorizes f for every pool, so cut updates only require re-evaluating
// T(X_i) on the new pool.
struct Element {
  Eigen::MatrixXd X;
  double base = 0.0;
};

struct ProxSolution {
  Eigen::VectorXd gamma;
  Eigen::VectorXd lambda;
  double model = 0.0;
};

void project_to_simplex(Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd sorted = v;
  std::sort(sorted.data(), sorted.data() + n, std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += sorted(i);
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted(i) - candidate > 0.0) theta = candidate;
  }
  v = (v.array() - theta).max(0.0).matrix();
}

// min_{gamma >= 0} max_i (base_i + g_i'gamma) + (u/2)|gamma - center|^2,
// solved through its dual over the unit simplex with accelerated projected
// gradient ascent. For fixed weights lambda the inner minimizer is
// max(0, center - G lambda / u).
ProxSolution solve_prox(const Eigen::VectorXd& base, const Eigen::MatrixXd& G,
                        const Eigen::VectorXd& center, double u,
                        const Eigen::VectorXd& warm) {
  const Eigen::Index count = base.size();
  auto inner = [&](const Eigen::VectorXd& lambda) -> Eigen::VectorXd {
    return (center - G * lambda / u).cwiseMax(0.0);
  };

  ProxSolution out;
  Eigen::VectorXd lambda = warm.size() == count ? warm : Eigen::VectorXd::Constant(count, 1.0 / count);
  project_to_simplex(lambda);
  if (G.rows() > 0 && count > 1) {
    const double lipschitz = std::max(G.squaredNorm() / u, 1e-12);
    Eigen::VectorXd point = lambda;
    double momentum = 1.0;
    for (int it = 0; it < 1000; ++it) {
      const Eigen::VectorXd gamma = inner(point);
      const Eigen::VectorXd grad = base + G.transpose() * gamma;
      Eigen::VectorXd next = point + grad / lipschitz;
      project_to_simplex(next);
      const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      point = next + ((momentum - 1.0) / next_momentum) * (next - lambda);
      project_to_simplex(point);
      const double change = (next - lambda).lpNorm<1>();
      lambda = next;
      momentum = next_momentum;
      if (change < 1e-12) break;
    }
  }
  out.lambda = lambda;
  out.gamma = inner(lambda);
  out.model = (base + G.transpose() * out.gamma).maxCoeff();
  return out;
}

Eigen::MatrixXd subgradient_matrix(const std::vector<Element>& bundle, const CutPool& pool) {
  Eigen::MatrixXd G(static_cast<Eigen::Index>(pool.size()),
                    static_cast<Eigen::Index>(bundle.size()));
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    G.col(static_cast<Eigen::Index>(i)) = evaluate_cuts(pool.cuts, bundle[i].X);
  }
  return G;
}

// Keeps the bundle within `limit` elements: first drops unused elements,
// then merges the oldest ones into a single aggregate with weights lambda.
void compress(std::vector<Element>& bundle, Eigen::VectorXd& lambda, std::size_t limit) {
  if (bundle.size() <= limit) return;
  std::vector<Element> kept;
  std::vector<double> weights;
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const bool newest = i + 1 == bundle.size();
    if (newest || lambda(static_cast<Eigen::Index>(i)) > 1e-10) {
      kept.push_back(std::move(bundle[i]));
      weights.push_back(lambda(static_cast<Eigen::Index>(i)));
    }
  }
  if (kept.size() > limit) {
    const std::size_t merge = kept.size() - limit + 1;
    double total = 0.0;
    for (std::size_t i = 0; i < merge; ++i) total += weights[i];
    Element aggregate;
    aggregate.X = Eigen::MatrixXd::Zero(kept[0].X.rows(), kept[0].X.cols());
    for (std::size_t i = 0; i < merge; ++i) {
      const double w = total > 0.0 ? weights[i] / total : 1.0 / static_cast<double>(merge);
      aggregate.X += w * kept[i].X;
      aggregate.base += w * kept[i].base;
    }
    std::vector<Element> merged;
    std::vector<double> merged_weights;
    merged.push_back(std::move(aggregate));
    merged_weights.push_back(total);
    for (std::size_t i = merge; i < kept.size(); ++i) {
      merged.push_back(std::move(kept[i]));
      merged_weights.push_back(weights[i]);
    }
    kept = std::move(merged);
    weights = std::move(merged_weights);
  }
  bundle = std::move(kept);
  lambda = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

}  // namespace

BundleResult minimize_dual(const RelaxationData& relax, double lower_bound,
                           const BundleOptions& options) {
  const auto n = static_cast<std::size_t>(relax.dim);
  const std::size_t per_update =
      options.cuts_per_update ? options.cuts_per_update : std::min<std::size_t>(5 * n, 300);

  BundleResult result;
  result.pool.capacity = options.pool_capacity ? options.pool_capacity : 10 * n;
  CutPool& pool = result.pool;

  auto trace = [&](double f, const char* step) {
    if (options.trace) {
      *options.trace << result.evals << ',' << f << ',' << pool.size() << ',' << step << '\n';
    }
  };
  auto evaluate = [&](const Eigen::VectorXd& gamma) {
    OracleValue value = oracle_eval(pool, gamma, relax, options.ipm);
    ++result.evals;
    result.evaluated_bounds.push_back(value.upper);
    result.bound = std::min(result.bound, value.upper);
    result.X_last = value.X;
    return value;
  };

  std::vector<Element> bundle;
  Eigen::VectorXd center = Eigen::VectorXd::Zero(0);
  OracleValue first = evaluate(center);
  double center_value = first.upper;
  result.sdp_bound = first.upper;
  result.X_center = first.X;
  result.center_values.push_back(center_value);
  bundle.push_back({first.X, relax.cost.cwiseProduct(first.X).sum() + relax.const_term});
  trace(first.upper, "init");

  auto update_pool = [&]() {
    for (std::size_t c = 0; c < pool.size(); ++c) pool.gamma[c] = center(static_cast<Eigen::Index>(c));
    remove_inactive(pool, options.gamma_drop);
    add_cuts(pool, separate(result.X_center, per_update, &pool, options.violation_tol));
    center = Eigen::Map<Eigen::VectorXd>(pool.gamma.data(), static_cast<Eigen::Index>(pool.size()));
  };

  if (prunable(result.bound, lower_bound)) {
    result.reason = BundleStop::Prune;
    return result;
  }
  update_pool();

  double u = options.prox_init;
  int descent_streak = 0;
  int null_streak = 0;
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
  result.reason = BundleStop::Budget;

  while (result.evals < options.max_evals) {
    if (pool.size() == 0) {
      result.reason = BundleStop::Stall;
      break;
    }
    Eigen::VectorXd base(static_cast<Eigen::Index>(bundle.size()));
    for (std::size_t i = 0; i < bundle.size(); ++i) base(static_cast<Eigen::Index>(i)) = bundle[i].base;
    const Eigen::MatrixXd G = subgradient_matrix(bundle, pool);
    const ProxSolution prox = solve_prox(base, G, center, u, lambda);
    lambda = prox.lambda;

    const double predicted = center_value - prox.model;
    if (predicted <= options.stall_tol * (1.0 + std::abs(center_value))) {
      result.reason = BundleStop::Stall;
      break;
    }

    OracleValue trial = evaluate(prox.gamma);
    bundle.push_back({trial.X, relax.cost.cwiseProduct(trial.X).sum() + relax.const_term});
    lambda.conservativeResize(static_cast<Eigen::Index>(bundle.size()));
    lambda(lambda.size() - 1) = 0.0;

    if (prunable(result.bound, lower_bound)) {
      trace(trial.upper, "prune");
      result.reason = BundleStop::Prune;
      if (trial.upper <= center_value) {
        center_value = trial.upper;
        result.X_center = trial.X;
        result.center_values.push_back(center_value);
        ++result.descent_steps;
      }
      break;
    }

    if (trial.upper <= center_value - options.descent_param * predicted) {
      center = prox.gamma;
      center_value = trial.upper;
      result.X_center = trial.X;
      result.center_values.push_back(center_value);
      ++result.descent_steps;
      null_streak = 0;
      if (++descent_streak >= 2) {
        u = std::max(options.prox_min, u / 2.0);
        descent_streak = 0;
      }
      trace(trial.upper, "descent");
      if (options.update_period > 0 && result.descent_steps % options.update_period == 0) {
        update_pool();
      }
    } else {
      ++result.null_steps;
      descent_streak = 0;
      if (++null_streak >= 2) {
        u = std::min(options.prox_max, u * 2.0);
        null_streak = 0;
      }
      trace(trial.upper, "null");
    }
    compress(bundle, lambda, options.max_bundle);
  }

  for (std::size_t c = 0; c < pool.size(); ++c) pool.gamma[c] = center(static_cast<Eigen::Index>(c));
  return result;
}

}  // namespace kqkp
