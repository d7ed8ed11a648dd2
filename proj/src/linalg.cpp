#include "robustsi/linalg.h"

#include "robustsi/errors.h"

namespace robustsi {

Eigen::VectorXd least_squares_apply(const Eigen::MatrixXd& M,
                                    const Eigen::VectorXd& v) {
  if (M.rows() != v.size()) {
    throw DimensionMismatch("least_squares_apply: M has " +
                            std::to_string(M.rows()) + " rows, v has " +
                            std::to_string(v.size()));
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  return cod.solve(v);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  return cod.pseudoInverse();
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& M) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  return cod.rank();
}

}  // namespace robustsi
