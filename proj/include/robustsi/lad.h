#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robustsi/path.h"
#include "robustsi/types.h"

namespace robustsi {

// Optimal simplex basis of the LAD linear program in homotopy form:
// min 1'rho+ + 1'rho-  s.t.  rho+ - rho- + X(beta+ - beta-) = y,
// all 2n+2d variables nonnegative. Columns are ordered
// (rho+_1, rho-_1, ..., rho+_n, rho-_n, beta+_1, beta-_1, ...).
struct LadBasis {
  std::vector<int> basic;                       // n column indices, row-aligned
  Eigen::PartialPivLU<Eigen::MatrixXd> factor;  // LU of the basis matrix
};

struct LadSolution {
  Eigen::VectorXd beta;
  double objective;
  LadBasis basis;
  // All nonbasic reduced costs strictly positive: the optimum is a unique
  // vertex. Oracle comparisons of detected sets are restricted to such z.
  bool unique_optimum;
};

// Solves min sum_i |y_i - x_i'beta| by primal simplex on the split
// formulation. Optimality is certified by a duality-gap check.
LadSolution solve_lad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Exact solution path of LAD regression along y(z) = a + b*z over the
// window, by parametric right-hand-side stepping: basic values are affine
// in z; the next breakpoint is the smallest z where one hits zero, and a
// dual-simplex pivot restores optimality there. max_breakpoints <= 0 picks
// the default safety cap.
PiecewisePath lad_path(const Eigen::MatrixXd& X, const DataLine& line,
                       double z_lo, double z_hi, int max_breakpoints = 0);

}  // namespace robustsi
