#pragma once

#include <Eigen/Dense>

namespace robustsi {

// Minimum-norm least-squares solution M^+ v via a rank-revealing complete
// orthogonal decomposition. Rank-deficient M is allowed.
Eigen::VectorXd least_squares_apply(const Eigen::MatrixXd& M,
                                    const Eigen::VectorXd& v);

// Explicit Moore-Penrose pseudo-inverse (dense; fine at this problem scale).
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M);

// Numerical rank from the same decomposition.
Eigen::Index numerical_rank(const Eigen::MatrixXd& M);

}  // namespace robustsi
