#include "kqkp/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace kqkp {

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::SlowProgress: return "SlowProgress";
    case SdpStatus::IterLimit: return "IterLimit";
  }
  return "Unknown";
}

Eigen::MatrixXd assemble_schur(const Eigen::MatrixXd& Zinv, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd M(n + 2, n + 2);

  // trace(Z^-1 e_j e_j' X e_i e_i') = (Z^-1)_ij X_ji
  M.topLeftCorner(n, n) = Zinv.cwiseProduct(X.transpose());

  const Eigen::VectorXd Zu = Zinv * u;
  const Eigen::VectorXd Zv = Zinv * v;
  const Eigen::VectorXd Xu = X * u;
  const Eigen::VectorXd Xv = X * v;

  // trace(Z^-1 uu' X e_i e_i') = (Z^-1 u)_i (X u)_i
  M.block(0, n, n, 1) = Zu.cwiseProduct(Xu);
  M.block(0, n + 1, n, 1) = Zv.cwiseProduct(Xv);
  M.block(n, 0, 1, n) = M.block(0, n, n, 1).transpose();
  M.block(n + 1, 0, 1, n) = M.block(0, n + 1, n, 1).transpose();

  // trace(Z^-1 ww' X zz') = (z' Z^-1 w)(w' X z)
  M(n, n) = u.dot(Zu) * u.dot(Xu);
  M(n + 1, n + 1) = v.dot(Zv) * v.dot(Xv);
  M(n, n + 1) = u.dot(Zv) * v.dot(Xu);
  M(n + 1, n) = v.dot(Zu) * u.dot(Xv);
  return M;
}

namespace {

// Scaled working copy of the problem data.
struct Problem {
  Eigen::Index n = 0;
  Eigen::MatrixXd C;
  Eigen::VectorXd ones;
  Eigen::VectorXd a;
  Eigen::VectorXd rhs;  // (e, r_E, r_A)

  Eigen::VectorXd apply(const Eigen::MatrixXd& W) const {
    Eigen::VectorXd out(n + 2);
    out.head(n) = W.diagonal();
    out(n) = ones.dot(W * ones);
    out(n + 1) = a.dot(W * a);
    return out;
  }

  Eigen::MatrixXd adjoint(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd out = y(n) * ones * ones.transpose() + y(n + 1) * a * a.transpose();
    out.diagonal() += y.head(n);
    return out;
  }
};

void symmetrize(Eigen::MatrixXd& W) { W = 0.5 * (W + W.transpose()).eval(); }

// Largest alpha with W + alpha dW psd, given W positive definite.
double max_psd_step(const Eigen::MatrixXd& W, const Eigen::MatrixXd& dW) {
  Eigen::LLT<Eigen::MatrixXd> llt(W);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto L = llt.matrixL();
  Eigen::MatrixXd T = L.solve(dW);
  T = L.solve(T.transpose()).transpose();
  symmetrize(T);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_scalar_step(double v, double dv) {
  return dv >= 0.0 ? std::numeric_limits<double>::infinity() : -v / dv;
}

bool is_pd(const Eigen::MatrixXd& W) {
  Eigen::LLT<Eigen::MatrixXd> llt(W);
  return llt.info() == Eigen::Success;
}

enum class Start { Structured, ScaledIdentity };

struct Direction {
  Eigen::MatrixXd dX;
  Eigen::MatrixXd dZ;
  Eigen::VectorXd dy;
  double ds = 0.0;
  double dt = 0.0;
};

SdpSolution solve_from(const RelaxationData& data, const Eigen::MatrixXd& cost,
                       const IpmOptions& options, Start start) {
  const Eigen::Index n = data.dim;
  const Eigen::Index m = n + 2;

  const double cost_scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double a_norm = data.cap_vector.norm();
  const double a_scale = std::max(1.0, a_norm / std::sqrt(static_cast<double>(n)));

  Problem p;
  p.n = n;
  p.C = cost / cost_scale;
  symmetrize(p.C);
  p.ones = Eigen::VectorXd::Ones(n);
  p.a = data.cap_vector / a_scale;
  p.rhs.resize(m);
  p.rhs.head(n).setOnes();
  p.rhs(n) = data.rhs_card;
  p.rhs(n + 1) = data.rhs_cap / (a_scale * a_scale);

  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Z;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double s = 1.0;
  double t = 1.0;
  const double nd = static_cast<double>(n);
  if (start == Start::Structured) {
    // X = alpha I + beta ee' meets diag(X) = e and <E,X> = r_E exactly, and
    // is positive definite whenever 2k != n.
    if (n >= 2) {
      const double beta = (data.rhs_card - nd) / (nd * nd - nd);
      X = (1.0 - beta) * X + beta * Eigen::MatrixXd::Ones(n, n);
    }
    // Dual feasible: diagonally dominant Diag(y) - C plus t A.
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = p.C.row(i).cwiseAbs().sum() + 1.0;
    }
    const double a_X = p.a.dot(X * p.a);
    s = p.rhs(n + 1) - a_X > 1e-3 ? p.rhs(n + 1) - a_X : 1.0;
    // Slack pair on the same scale as the matrix part; a larger t keeps Z
    // positive definite.
    y(n + 1) = 1.0;
    Z = p.adjoint(y) - p.C;
    t = std::max(1.0, X.cwiseProduct(Z).sum() / nd / s);
    y(n + 1) = t;
    Z = p.adjoint(y) - p.C;
    symmetrize(Z);
  } else {
    // Large multiples of the identity, infeasible on both sides.
    const double a2 = p.a.squaredNorm();
    const double xi = std::max({10.0, std::sqrt(nd), nd * (1.0 + p.rhs(n)) / (1.0 + nd),
                                nd * (1.0 + p.rhs(n + 1)) / (1.0 + a2)});
    const double eta = std::max({10.0, nd, a2, p.C.norm()});
    X *= xi;
    Z = eta * Eigen::MatrixXd::Identity(n, n);
    s = xi;
    t = eta;
    y(n + 1) = t;
  }

  SdpSolution sol;
  const double cost_norm = p.C.norm();
  std::vector<double> progress;
  sol.status = SdpStatus::IterLimit;

  int iter = 0;
  for (;; ++iter) {
    const Eigen::VectorXd Rp = p.rhs - p.apply(X) - s * Eigen::VectorXd::Unit(m, m - 1);
    Eigen::MatrixXd Rd = p.C - p.adjoint(y) + Z;
    symmetrize(Rd);

    // Objectives in original units; infeasibility per constraint family,
    // relative to the size of its right-hand side.
    const double pobj = p.C.cwiseProduct(X).sum() * cost_scale;
    const double dobj = p.rhs.dot(y) * cost_scale;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(dobj));
    const double pinf = std::max({Rp.head(n).cwiseAbs().maxCoeff(),
                                  std::abs(Rp(n)) / (1.0 + p.rhs(n)),
                                  std::abs(Rp(n + 1)) * a_scale * a_scale / (1.0 + data.rhs_cap)});
    const double dinf = Rd.norm() / (1.0 + cost_norm);
    // Normalized by the larger objective: the dual value may cross zero
    // during the first infeasible steps.
    const double compl_gap = (X.cwiseProduct(Z).sum() + s * t) * cost_scale /
                             (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    sol.gap_history.push_back(compl_gap);
    // Absolute complementarity in scaled units: the normalized gap can stall
    // while the objectives themselves shrink.
    const double mu_now = (X.cwiseProduct(Z).sum() + s * t) / static_cast<double>(n + 1);
    progress.push_back(std::max({mu_now, pinf, dinf}));

    // The capacity row is also held to an absolute level in original units.
    const double cap_abs = std::abs(Rp(n + 1)) * a_scale * a_scale;
    if (relgap <= options.tol && pinf <= options.feas_tol && dinf <= options.feas_tol &&
        cap_abs <= 1e-7) {
      sol.status = SdpStatus::Optimal;
      break;
    }
    if (iter >= options.max_iter) {
      sol.status = SdpStatus::IterLimit;
      break;
    }
    const auto w = static_cast<std::size_t>(options.slow_window);
    if (progress.size() > 2 * w) {
      const auto split = progress.end() - static_cast<std::ptrdiff_t>(w);
      const double before = *std::min_element(progress.begin(), split);
      const double recent = *std::min_element(split, progress.end());
      if (recent > 0.99 * before) {
        sol.status = SdpStatus::SlowProgress;
        break;
      }
    }

    // A breakdown after the first step keeps the last accepted iterate; its
    // certified bound is still valid.
    auto breakdown = [&](const char* what) {
      if (iter == 0) throw Error(ErrorCode::NumericalBreakdown, what);
      sol.status = SdpStatus::SlowProgress;
    };

    Eigen::LLT<Eigen::MatrixXd> zllt(Z);
    if (zllt.info() != Eigen::Success) {
      breakdown("dual slack matrix lost definiteness");
      break;
    }
    Eigen::MatrixXd Zinv = zllt.solve(Eigen::MatrixXd::Identity(n, n));
    symmetrize(Zinv);

    Eigen::MatrixXd M = assemble_schur(Zinv, X, p.ones, p.a);
    M(m - 1, m - 1) += s / t;
    symmetrize(M);
    Eigen::LLT<Eigen::MatrixXd> mllt(M);
    Eigen::LDLT<Eigen::MatrixXd> mldlt;
    const bool use_llt = mllt.info() == Eigen::Success;
    if (!use_llt) {
      mldlt.compute(M);
      if (mldlt.info() != Eigen::Success) {
        breakdown("Schur complement factorization failed");
        break;
      }
    }

    const Eigen::MatrixXd RdX = Rd * X;
    auto direction = [&](double mu_target, const Eigen::MatrixXd* K, double kst) {
      Direction d;
      Eigen::MatrixXd inner = RdX;
      if (K) inner -= *K;
      const Eigen::MatrixXd W = mu_target * Zinv + Zinv * inner;
      Eigen::VectorXd rhs = p.apply(W);
      rhs(m - 1) += (mu_target - kst) / t;
      rhs -= p.rhs;
      d.dy = use_llt ? Eigen::VectorXd(mllt.solve(rhs)) : Eigen::VectorXd(mldlt.solve(rhs));
      d.dZ = p.adjoint(d.dy) - Rd;
      Eigen::MatrixXd corr = d.dZ * X;
      if (K) corr += *K;
      d.dX = mu_target * Zinv - X - Zinv * corr;
      symmetrize(d.dX);
      d.dt = d.dy(m - 1);
      d.ds = (mu_target - s * t - kst - s * d.dt) / t;
      return d;
    };
    double frac = options.step_fraction;
    auto step_lengths = [&](const Direction& d) {
      const double ap = std::min({1.0, frac * max_psd_step(X, d.dX),
                                  frac * max_scalar_step(s, d.ds)});
      const double ad = std::min({1.0, frac * max_psd_step(Z, d.dZ),
                                  frac * max_scalar_step(t, d.dt)});
      return std::pair{ap, ad};
    };

    const double mu = (X.cwiseProduct(Z).sum() + s * t) / static_cast<double>(n + 1);
    const Direction pred = direction(0.0, nullptr, 0.0);
    const auto [ap_aff, ad_aff] = step_lengths(pred);
    const double mu_aff =
        ((X + ap_aff * pred.dX).cwiseProduct(Z + ad_aff * pred.dZ).sum() +
         (s + ap_aff * pred.ds) * (t + ad_aff * pred.dt)) /
        static_cast<double>(n + 1);
    // Short predictor steps ask for more centering.
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2));
    const double sigma = std::clamp(std::pow(mu_aff / mu, expon), 0.0, 1.0);

    // Stay further from the boundary after short predictor steps.
    frac = std::min(options.step_fraction, 0.9 + 0.09 * std::min(ap_aff, ad_aff));
    const Eigen::MatrixXd K = pred.dZ * pred.dX;
    const Direction corr = direction(sigma * mu, &K, pred.ds * pred.dt);
    auto [ap, ad] = step_lengths(corr);

    Eigen::MatrixXd X_next = X + ap * corr.dX;
    while (!is_pd(X_next) && ap > 1e-12) {
      ap *= 0.8;
      X_next = X + ap * corr.dX;
    }
    Eigen::MatrixXd Z_next = Z + ad * corr.dZ;
    while (!is_pd(Z_next) && ad > 1e-12) {
      ad *= 0.8;
      Z_next = Z + ad * corr.dZ;
    }
    if (ap <= 1e-12 && ad <= 1e-12) {
      breakdown("step length collapsed");
      break;
    }

    X = std::move(X_next);
    Z = std::move(Z_next);
    symmetrize(X);
    symmetrize(Z);
    s += ap * corr.ds;
    y += ad * corr.dy;
    t += ad * corr.dt;
    t = y(m - 1);

    if (options.log) {
      *options.log << iter << ',' << pobj << ',' << dobj << ','
                   << relgap << ',' << ap << ',' << ad << ',' << pinf << ',' << dinf
                   << '\n';
    }
  }
  sol.iterations = iter;

  // Back to original units.
  const double a2 = a_scale * a_scale;
  sol.X = X;
  sol.s = s * a2;
  sol.Z = Z * cost_scale;
  sol.y = y * cost_scale;
  sol.y(n + 1) /= a2;
  sol.t = sol.y(n + 1);
  sol.primal_obj = cost.cwiseProduct(X).sum();
  sol.dual_obj = Eigen::VectorXd::Ones(n).dot(sol.y.head(n)) + data.rhs_card * sol.y(n) +
                 data.rhs_cap * sol.y(n + 1);

  {
    Eigen::VectorXd y_safe = y;
    y_safe(n + 1) = std::max(0.0, y_safe(n + 1));
    Eigen::MatrixXd S = p.adjoint(y_safe) - p.C;
    symmetrize(S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double from_y = p.rhs.dot(y_safe) + static_cast<double>(n) * std::max(0.0, -lmin);
    // y = 0 is always available: <C,X> <= n lambda_max(C) since tr X = n.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ceig(p.C, Eigen::EigenvaluesOnly);
    const double from_zero = static_cast<double>(n) * std::max(0.0, ceig.eigenvalues().maxCoeff());
    sol.certified_bound = std::min(from_y, from_zero) * cost_scale;
  }

  const Eigen::VectorXd& av = data.cap_vector;
  double pres = (X.diagonal().array() - 1.0).abs().maxCoeff();
  pres = std::max(pres, std::abs(X.sum() - data.rhs_card));
  pres = std::max(pres, av.dot(X * av) - data.rhs_cap);
  sol.primal_residual = pres;
  Eigen::MatrixXd Rd = cost + sol.Z;
  Rd.diagonal() -= sol.y.head(n);
  Rd -= sol.y(n) * Eigen::MatrixXd::Ones(n, n) + sol.y(n + 1) * av * av.transpose();
  sol.dual_residual = Rd.norm();
  return sol;
}

}  // namespace

SdpSolution solve_sdp(const RelaxationData& data, const Eigen::MatrixXd* cost_override,
                      const IpmOptions& options) {
  const Eigen::MatrixXd& cost = cost_override ? *cost_override : data.cost;
  SdpSolution first = solve_from(data, cost, options, Start::Structured);
  if (first.status == SdpStatus::Optimal) return first;
  // Thin capacity slabs can jam one start and not the other.
  SdpSolution second;
  try {
    second = solve_from(data, cost, options, Start::ScaledIdentity);
  } catch (const Error&) {
    return first;
  }
  if (second.status == SdpStatus::Optimal) return second;
  auto distance = [&](const SdpSolution& r) {
    return std::max(std::abs(r.certified_bound - r.primal_obj) / (1.0 + std::abs(r.certified_bound)),
                    r.primal_residual / (1.0 + data.rhs_cap));
  };
  return distance(second) < distance(first) ? second : first;
}

double sdp_bound(const RelaxationData& data, const Eigen::MatrixXd* cost_override,
                 const IpmOptions& options) {
  return solve_sdp(data, cost_override, options).certified_bound + data.const_term;
}

}  // namespace kqkp
