#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "robustsi/inference.h"
#include "robustsi/interval_set.h"
#include "robustsi/types.h"

namespace robustsi {

// Lasso solution of the mean-shift reformulation of Huber regression:
// u_hat = argmin 1/2 ||y_tilde - proj*u||^2 + lambda ||u||_1 after the
// design has been projected out. Nonzero coordinates of u_hat are the
// detected outliers; their signs are part of the conditioning event.
struct LassoSolution {
  Eigen::VectorXd u_hat;
  std::vector<int> active;  // ascending indices with u_hat != 0
  Eigen::VectorXd signs;    // +-1 per active entry
  double lambda = 0.0;
  double objective = 0.0;
};

// y_tilde = P y and the residual projector P = I - X X^+ (symmetric
// idempotent).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> project_out_design(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Cyclic coordinate descent to duality gap <= 1e-9 (1 + objective).
LassoSolution lasso_solve(const Eigen::VectorXd& y_tilde,
                          const Eigen::MatrixXd& proj, double lambda);

// The sign-fixed selection event {active set = A, signs = s} along the line,
// as affine inequalities in z: the active-block KKT equalities give
// u_A(z) affine in z, sign constraints and the inactive-block bound
// |corr_j(z)| <= lambda clip z to a single interval containing z_obs.
IntervalSet hl_truncation_interval(const LassoSolution& sol,
                                   const DataLine& line,
                                   const Eigen::MatrixXd& proj);

// Selective p-value against the sign-conditioned interval (same pivot as
// selective_p, narrower conditioning).
double hl_p_value(const TestDirection& dir, const IntervalSet& interval,
                  double z_obs);

}  // namespace robustsi
