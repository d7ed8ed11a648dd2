#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "robustsi/path.h"
#include "robustsi/types.h"

namespace robustsi {

// Huber regression along y(z) = a + b*z as a parametric quadratic program:
//   min 1/2 u'u + delta*1'v   over r = (beta, u, v)
//   s.t. S r <= u0 + u1*z,
// with u_i the capped residual magnitude and v_i the excess beyond delta.
// Constraint rows of S, in five blocks of n:
//   [0,n):    X beta - u - v <= y(z)     binding when r_i < 0
//   [n,2n):  -X beta - u - v <= -y(z)    binding when r_i > 0
//   [2n,3n): -u <= 0
//   [3n,4n):  u <= delta                 touches with zero multiplier
//   [4n,5n): -v <= 0                     binding when |r_i| < delta
struct HuberProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd a, b;
  double delta = 0.0;
  int n = 0, d = 0;
  Eigen::MatrixXd S;        // 5n x (d+2n)
  Eigen::VectorXd P_diag;   // quadratic term, diag(0_d, 1_n, 0_n)
  Eigen::VectorXd q;        // linear term (0, 0, delta*1)
  Eigen::VectorXd u0, u1;   // constraint offsets, h(z) = u0 + u1*z

  static std::shared_ptr<const HuberProblem> make(Eigen::MatrixXd X,
                                                  Eigen::VectorXd a,
                                                  Eigen::VectorXd b,
                                                  double delta);
  Eigen::VectorXd h(double z) const { return u0 + u1 * z; }
};

// KKT state of the parametric QP at one z: active constraints (positive
// multipliers), primal point, multipliers, and the direction (psi, gamma)
// solving [[P, S_A'], [S_A, 0]] (psi; gamma) = (0; u1_A).
struct HuberKkt {
  std::shared_ptr<const HuberProblem> problem;
  double z = 0.0;
  std::vector<int> active;
  Eigen::VectorXd primal;       // (beta, u, v)
  Eigen::VectorXd multipliers;  // aligned with `active`
  Eigen::VectorXd psi;
  Eigen::VectorXd gamma;
  // The direction system needed least-squares regularization; the caller
  // should prefer a fresh re-solve at the next event.
  bool direction_degenerate = false;

  Eigen::VectorXd beta() const { return primal.head(problem->d); }
};

struct HuberSolution {
  Eigen::VectorXd beta;
  double objective;
  HuberKkt kkt;
};

double huber_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       double delta, const Eigen::VectorXd& beta);

// Minimizes the Huber loss; the active-set state is certified against the
// stationarity and feasibility residuals before returning.
HuberSolution solve_huber(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          double delta);

struct BreakpointStep {
  enum class Kind { AddConstraint, DropConstraint, WindowEnd };
  Kind kind = Kind::WindowEnd;
  double t = 0.0;      // step length to the event (ignored for WindowEnd)
  int constraint = -1; // S row entering or leaving
  // Competing add/drop events within 1e-10 of each other: the caller must
  // discard the homotopy state and re-solve fresh past the breakpoint.
  bool simultaneous = false;
};

// Step length to the next active-set change from kkt valid at z. Slack rates
// include the motion of the constraint offsets (u1), so add events are exact
// for the rows whose right-hand side depends on z.
BreakpointStep huber_breakpoint_step(const HuberKkt& kkt, double z);

// Exact Huber solution path over the window by active-set continuation,
// with fresh QP re-solves on degenerate events. max_events <= 0 picks the
// default safety cap.
PiecewisePath huber_path(const Eigen::MatrixXd& X, const DataLine& line,
                         double delta, double z_lo, double z_hi,
                         int max_events = 0);

namespace detail {
// Newton fit + KKT assembly at a fixed parameter value of the line.
HuberKkt huber_fit_at(const std::shared_ptr<const HuberProblem>& problem,
                      double z);
}  // namespace detail

}  // namespace robustsi
