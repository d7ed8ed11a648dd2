#include "robustsi/types.h"

#include <algorithm>

#include "robustsi/errors.h"

namespace robustsi {

Dataset::Dataset(Eigen::MatrixXd X_, Eigen::VectorXd y_, Eigen::MatrixXd Sigma_)
    : X(std::move(X_)), y(std::move(y_)), Sigma(std::move(Sigma_)) {
  const Eigen::Index nn = X.rows();
  if (nn < 2) throw DimensionMismatch("Dataset requires n >= 2");
  if (X.cols() < 1) throw DimensionMismatch("Dataset requires d >= 1");
  if (y.size() != nn) throw DimensionMismatch("y length must match X rows");
  if (Sigma.rows() != nn || Sigma.cols() != nn) {
    throw DimensionMismatch("Sigma must be n x n");
  }
  const double scale = std::max(1.0, Sigma.cwiseAbs().maxCoeff());
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericalFailure("Sigma is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw NumericalFailure("Sigma has a significantly negative eigenvalue");
  }
}

DetectionRule DetectionRule::threshold(double xi) {
  if (!(xi > 0.0)) throw NumericalFailure("threshold xi must be > 0");
  DetectionRule r;
  r.kind = Kind::Threshold;
  r.xi = xi;
  return r;
}

DetectionRule DetectionRule::top_k(int k) {
  if (k < 1) throw NumericalFailure("top-K requires K >= 1");
  DetectionRule r;
  r.kind = Kind::TopK;
  r.k = k;
  return r;
}

EstimatorSpec EstimatorSpec::huber(double delta) {
  if (!(delta > 0.0)) throw NumericalFailure("Huber delta must be > 0");
  return {Kind::Huber, delta};
}

bool OutlierSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

}  // namespace robustsi
