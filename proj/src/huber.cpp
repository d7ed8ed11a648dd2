#include "robustsi/huber.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustsi/errors.h"
#include "robustsi/linalg.h"

namespace robustsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSimultaneousTol = 1e-10;
constexpr double kRestartNudge = 1e-9;

double huber_psi(double r, double delta) {
  const double ar = std::abs(r);
  return ar <= delta ? 0.5 * r * r : delta * (ar - 0.5 * delta);
}

// Newton iteration on the (convex, piecewise-quadratic, C1) Huber loss with
// Armijo backtracking, seeded from the least-squares fit. Terminates with a
// near-machine-zero gradient; the piecewise structure makes the final step
// exact in most cases.
Eigen::VectorXd newton_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double delta) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  Eigen::VectorXd beta = least_squares_apply(X, y);
  const double gscale =
      1.0 + delta * (1.0 + X.cwiseAbs().maxCoeff()) * std::sqrt(double(n));
  const auto gradient_at = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = y - X * b;
    Eigen::VectorXd score(n);
    for (int i = 0; i < n; ++i) score(i) = std::clamp(r(i), -delta, delta);
    return Eigen::VectorXd(-X.transpose() * score);
  };

  double obj = huber_objective(X, y, delta, beta);
  for (int iter = 0; iter < 300; ++iter) {
    const Eigen::VectorXd r = y - X * beta;
    const Eigen::VectorXd grad = gradient_at(beta);
    if (grad.cwiseAbs().maxCoeff() <= 1e-12 * gscale) return beta;

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      if (std::abs(r(i)) <= delta) H += X.row(i).transpose() * X.row(i);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step = ldlt.solve(-grad);
    const bool usable = ldlt.info() == Eigen::Success && step.allFinite() &&
                        step.norm() > 0.0 &&
                        grad.dot(step) <= -1e-12 * grad.norm() * step.norm();
    if (!usable) {
      // Singular curvature (too few quadratic-zone rows): regularize. The
      // resulting near-gradient step is pulled back by the line search.
      H.diagonal().array() += 1e-8 * (1.0 + H.diagonal().maxCoeff());
      step = H.ldlt().solve(-grad);
    }
    double t = 1.0;
    const double slope = grad.dot(step);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = beta + t * step;
      const double cand_obj = huber_objective(X, y, delta, cand);
      if (cand_obj <= obj + 1e-4 * t * slope) {
        beta = cand;
        obj = cand_obj;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;  // stalled at the numerical floor
  }
  // At a kink configuration (some |r_i| exactly at delta) the curvature
  // membership can flip each iteration and the gradient plateaus slightly
  // above the fast-path target. Accept when the stationarity certificate
  // holds with margin; only a genuinely unconverged run is an error.
  if (gradient_at(beta).norm() <= 2e-9 * gscale) return beta;
  throw NumericalFailure("Huber Newton iteration failed to converge");
}

struct DirectionResult {
  Eigen::VectorXd psi;
  Eigen::VectorXd gamma;
  bool degenerate = false;
};

// d(slack_row)/dz for a primal direction psi; the offset motion u1 belongs
// in the rate for the rows whose right-hand side rides the line.
double slack_rate(const HuberProblem& pb, const Eigen::VectorXd& psi,
                  int row) {
  return pb.S.row(row).dot(psi) - pb.u1(row);
}

// Solves [[diag(P), S_A'],[S_A, 0]] (psi;gamma) = (0; u1_A). A singular
// system (linearly dependent active rows or a flat quadratic) falls back to
// a least-squares solve with 1e-10 regularization on the dual block; if even
// that leaves a large residual, the state is flagged for a fresh re-solve.
DirectionResult solve_direction(const HuberProblem& pb,
                                const std::vector<int>& active) {
  const int nv = pb.d + 2 * pb.n;
  const int na = static_cast<int>(active.size());
  const int m = nv + na;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  M.topLeftCorner(nv, nv).diagonal() = pb.P_diag;
  for (int k = 0; k < na; ++k) {
    M.block(0, nv + k, nv, 1) = pb.S.row(active[k]).transpose();
    M.block(nv + k, 0, 1, nv) = pb.S.row(active[k]);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < na; ++k) rhs(nv + k) = pb.u1(active[k]);

  DirectionResult out;
  Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
  const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  if (!sol.allFinite() || (M * sol - rhs).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    Eigen::MatrixXd Mreg = M;
    Mreg.bottomRightCorner(na, na).diagonal().array() -= 1e-10;
    sol = Mreg.completeOrthogonalDecomposition().solve(rhs);
    out.degenerate =
        !sol.allFinite() ||
        (M * sol - rhs).cwiseAbs().maxCoeff() > 1e-6 * scale;
  }
  out.psi = sol.head(nv);
  out.gamma = sol.tail(na);
  return out;
}

}  // namespace

std::shared_ptr<const HuberProblem> HuberProblem::make(Eigen::MatrixXd X,
                                                       Eigen::VectorXd a,
                                                       Eigen::VectorXd b,
                                                       double delta) {
  if (!(delta > 0.0)) throw NumericalFailure("Huber delta must be > 0");
  if (X.rows() != a.size() || X.rows() != b.size()) {
    throw DimensionMismatch("HuberProblem: line length must match X rows");
  }
  auto pb = std::make_shared<HuberProblem>();
  pb->n = static_cast<int>(X.rows());
  pb->d = static_cast<int>(X.cols());
  pb->delta = delta;
  const int n = pb->n, d = pb->d, nv = d + 2 * n;
  pb->S = Eigen::MatrixXd::Zero(5 * n, nv);
  pb->S.block(0, 0, n, d) = X;
  pb->S.block(0, d, n, n) = -Eigen::MatrixXd::Identity(n, n);
  pb->S.block(0, d + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  pb->S.block(n, 0, n, d) = -X;
  pb->S.block(n, d, n, n) = -Eigen::MatrixXd::Identity(n, n);
  pb->S.block(n, d + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  pb->S.block(2 * n, d, n, n) = -Eigen::MatrixXd::Identity(n, n);
  pb->S.block(3 * n, d, n, n) = Eigen::MatrixXd::Identity(n, n);
  pb->S.block(4 * n, d + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  pb->P_diag = Eigen::VectorXd::Zero(nv);
  pb->P_diag.segment(d, n).setOnes();
  pb->q = Eigen::VectorXd::Zero(nv);
  pb->q.tail(n).setConstant(delta);
  pb->u0 = Eigen::VectorXd::Zero(5 * n);
  pb->u0.head(n) = a;
  pb->u0.segment(n, n) = -a;
  pb->u0.segment(3 * n, n).setConstant(delta);
  pb->u1 = Eigen::VectorXd::Zero(5 * n);
  pb->u1.head(n) = b;
  pb->u1.segment(n, n) = -b;
  pb->X = std::move(X);
  pb->a = std::move(a);
  pb->b = std::move(b);
  return pb;
}

double huber_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       double delta, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd r = y - X * beta;
  double obj = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) obj += huber_psi(r(i), delta);
  return obj;
}

namespace detail {

HuberKkt huber_fit_at(const std::shared_ptr<const HuberProblem>& problem,
                      double z) {
  const HuberProblem& pb = *problem;
  const Eigen::VectorXd y = pb.a + pb.b * z;
  const Eigen::VectorXd beta = newton_fit(pb.X, y, pb.delta);
  const Eigen::VectorXd r = y - pb.X * beta;
  const int n = pb.n, d = pb.d;

  HuberKkt kkt;
  kkt.problem = problem;
  kkt.z = z;
  kkt.primal = Eigen::VectorXd::Zero(d + 2 * n);
  kkt.primal.head(d) = beta;
  std::vector<int> active;
  std::vector<double> mult;
  for (int i = 0; i < n; ++i) {
    const double ar = std::abs(r(i));
    kkt.primal(d + i) = std::min(ar, pb.delta);            // u_i
    kkt.primal(d + n + i) = std::max(ar - pb.delta, 0.0);  // v_i
  }
  // Positive-multiplier rows, in ascending row order: block 1, then 2, 5.
  // Classification is by sign with no dead band: a residual that is tiny
  // but nonzero still pins its side constraint, which keeps the direction
  // system honest right after a restart lands near a zero crossing. A
  // wrong-side guess at the boundary self-corrects through an immediate
  // drop event.
  for (int i = 0; i < n; ++i) {
    if (r(i) < 0.0) {
      active.push_back(i);
      mult.push_back(std::min(-r(i), pb.delta));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (r(i) > 0.0) {
      active.push_back(n + i);
      mult.push_back(std::min(r(i), pb.delta));
    }
  }
  for (int i = 0; i < n; ++i) {
    const double m5 = pb.delta - std::min(std::abs(r(i)), pb.delta);
    if (m5 > 0.0) {
      active.push_back(4 * n + i);
      mult.push_back(m5);
    }
  }
  kkt.active = std::move(active);
  kkt.multipliers =
      Eigen::Map<const Eigen::VectorXd>(mult.data(), mult.size());

  // Certify stationarity: P r + q + S_A' u_A = 0.
  Eigen::VectorXd stat = kkt.primal.cwiseProduct(pb.P_diag) + pb.q;
  for (std::size_t k = 0; k < kkt.active.size(); ++k) {
    stat += pb.S.row(kkt.active[k]).transpose() * kkt.multipliers(k);
  }
  const double qscale = 1.0 + pb.q.cwiseAbs().maxCoeff() +
                        pb.u0.cwiseAbs().maxCoeff() +
                        std::abs(z) * pb.u1.cwiseAbs().maxCoeff();
  if (stat.norm() > 1e-8 * qscale) {
    throw NumericalFailure("Huber KKT stationarity residual too large: " +
                           std::to_string(stat.norm()));
  }

  DirectionResult dir = solve_direction(pb, kkt.active);
  kkt.psi = std::move(dir.psi);
  kkt.gamma = std::move(dir.gamma);
  kkt.direction_degenerate = dir.degenerate;
  return kkt;
}

}  // namespace detail

HuberSolution solve_huber(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          double delta) {
  auto problem = HuberProblem::make(X, y, Eigen::VectorXd::Zero(y.size()),
                                    delta);
  HuberSolution sol;
  sol.kkt = detail::huber_fit_at(problem, 0.0);
  sol.beta = sol.kkt.beta();
  sol.objective = huber_objective(X, y, delta, sol.beta);
  return sol;
}

BreakpointStep huber_breakpoint_step(const HuberKkt& kkt, double z) {
  const HuberProblem& pb = *kkt.problem;
  const Eigen::VectorXd slack = pb.S * kkt.primal - pb.h(z);
  const Eigen::VectorXd srate = pb.S * kkt.psi - pb.u1;
  std::vector<char> in_active(pb.S.rows(), 0);
  for (int j : kkt.active) in_active[j] = 1;

  const double rate_tol =
      1e-10 * (1.0 + pb.u1.cwiseAbs().maxCoeff() + kkt.psi.cwiseAbs().sum());

  double t1 = kInf;
  int add_row = -1;
  for (int j = 0; j < pb.S.rows(); ++j) {
    if (in_active[j] || srate(j) <= rate_tol) continue;
    const double t = std::max(-slack(j), 0.0) / srate(j);
    if (t < t1) {
      t1 = t;
      add_row = j;
    }
  }
  double t2 = kInf;
  int drop_row = -1;
  for (std::size_t k = 0; k < kkt.active.size(); ++k) {
    if (kkt.gamma(k) >= -rate_tol) continue;
    const double t = std::max(kkt.multipliers(k), 0.0) / -kkt.gamma(k);
    if (t < t2) {
      t2 = t;
      drop_row = kkt.active[k];
    }
  }

  BreakpointStep step;
  if (t1 == kInf && t2 == kInf) {
    step.kind = BreakpointStep::Kind::WindowEnd;
    return step;
  }
  step.simultaneous = (t1 != kInf && t2 != kInf &&
                       std::abs(t1 - t2) < kSimultaneousTol * (1.0 + t1));
  if (t1 <= t2) {
    step.kind = BreakpointStep::Kind::AddConstraint;
    step.t = t1;
    step.constraint = add_row;
  } else {
    step.kind = BreakpointStep::Kind::DropConstraint;
    step.t = t2;
    step.constraint = drop_row;
  }
  return step;
}

PiecewisePath huber_path(const Eigen::MatrixXd& X, const DataLine& line,
                         double delta, double z_lo, double z_hi,
                         int max_events) {
  if (!(std::isfinite(z_lo) && std::isfinite(z_hi)) || z_lo >= z_hi) {
    throw WindowTooSmall("huber_path requires a finite nonempty window");
  }
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const int cap = max_events > 0 ? max_events : 10 * (n + d) * 40 + 1000;

  auto problem = HuberProblem::make(X, line.a, line.b, delta);
  HuberKkt kkt = detail::huber_fit_at(problem, z_lo);

  std::vector<double> breakpoints;
  std::vector<PathSegment> segments;
  double z_cur = z_lo;
  int events = 0;
  int stalls = 0;

  auto emit_segment = [&](double seg_start) {
    Eigen::VectorXd slope = kkt.psi.head(d);
    Eigen::VectorXd intercept = kkt.primal.head(d) - slope * seg_start;
    segments.push_back({std::move(intercept), std::move(slope)});
  };

  auto fresh_restart = [&](double z_new) {
    kkt = detail::huber_fit_at(problem, z_new);
    z_cur = z_new;
  };

  while (true) {
    if (kkt.direction_degenerate) {
      // Unusable direction out of this state: hold the solution constant
      // over a nudge-sized sliver and re-solve just past it.
      segments.push_back(
          {kkt.primal.head(d), Eigen::VectorXd::Zero(d)});
      const double z_new = z_cur + kRestartNudge;
      if (z_new >= z_hi) break;
      breakpoints.push_back(z_new);
      if (++events > cap) {
        throw CycleDetected("huber_path stuck in degenerate re-solves");
      }
      fresh_restart(z_new);
      continue;
    }
    const BreakpointStep step = huber_breakpoint_step(kkt, z_cur);
    const double z_next =
        step.kind == BreakpointStep::Kind::WindowEnd ? kInf : z_cur + step.t;
    emit_segment(z_cur);
    if (z_next >= z_hi) break;
    breakpoints.push_back(z_next);
    if (++events > cap) {
      throw CycleDetected("huber_path exceeded the event safety cap");
    }
    if (step.t < 1e-12) {
      if (++stalls > 5) {
        fresh_restart(z_next + kRestartNudge);
        stalls = 0;
        continue;
      }
    } else {
      stalls = 0;
    }
    if (step.simultaneous) {
      fresh_restart(z_next + kRestartNudge);
      continue;
    }

    // Advance the state to the breakpoint and apply the active-set change.
    kkt.primal += kkt.psi * step.t;
    kkt.multipliers += kkt.gamma * step.t;
    kkt.z = z_next;
    std::vector<int> active = kkt.active;
    std::vector<double> mult(kkt.multipliers.data(),
                             kkt.multipliers.data() + kkt.multipliers.size());
    if (step.kind == BreakpointStep::Kind::AddConstraint) {
      const auto pos = std::lower_bound(active.begin(), active.end(),
                                        step.constraint);
      mult.insert(mult.begin() + (pos - active.begin()), 0.0);
      active.insert(pos, step.constraint);
    } else {
      const auto pos =
          std::find(active.begin(), active.end(), step.constraint);
      mult.erase(mult.begin() + (pos - active.begin()));
      active.erase(pos);
    }
    kkt.active = std::move(active);
    kkt.multipliers =
        Eigen::Map<const Eigen::VectorXd>(mult.data(), mult.size());

    DirectionResult dir = solve_direction(*problem, kkt.active);
    bool healthy = !dir.degenerate;
    if (healthy && step.kind == BreakpointStep::Kind::AddConstraint) {
      // The entering multiplier must not immediately turn negative.
      const auto pos = std::lower_bound(kkt.active.begin(), kkt.active.end(),
                                        step.constraint);
      healthy = dir.gamma(pos - kkt.active.begin()) > -1e-9;
    }
    if (healthy && step.kind == BreakpointStep::Kind::DropConstraint) {
      // The leaving constraint must move into the feasible interior.
      const double rate = slack_rate(*problem, dir.psi, step.constraint);
      healthy = rate < 1e-9 * (1.0 + problem->u1.cwiseAbs().maxCoeff());
    }
    if (!healthy) {
      fresh_restart(z_next + kRestartNudge);
      continue;
    }
    kkt.psi = std::move(dir.psi);
    kkt.gamma = std::move(dir.gamma);
    kkt.direction_degenerate = false;
    z_cur = z_next;
  }

  return make_piecewise_path(z_lo, z_hi, std::move(breakpoints),
                             std::move(segments));
}

}  // namespace robustsi
