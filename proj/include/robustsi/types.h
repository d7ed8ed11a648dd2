#pragma once

#include <Eigen/Dense>
#include <vector>

namespace robustsi {

// Fixed inputs of an analysis: design matrix, observed response, and the
// (known) covariance of the response.
struct Dataset {
  Eigen::MatrixXd X;      // n x d
  Eigen::VectorXd y;      // n
  Eigen::MatrixXd Sigma;  // n x n, symmetric positive semidefinite

  Dataset(Eigen::MatrixXd X_, Eigen::VectorXd y_, Eigen::MatrixXd Sigma_);

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
};

// The one-dimensional affine family y(z) = a + b*z along which inference
// conditions; z_obs reproduces the observed response.
struct DataLine {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double z_obs;

  Eigen::VectorXd at(double z) const { return a + b * z; }
};

struct DetectionRule {
  enum class Kind { Threshold, TopK };
  Kind kind;
  double xi = 0.0;  // Threshold
  int k = 0;        // TopK

  static DetectionRule threshold(double xi);
  static DetectionRule top_k(int k);
};

struct EstimatorSpec {
  enum class Kind { Lad, Huber };
  Kind kind;
  double delta = 0.0;  // Huber transition width

  static EstimatorSpec lad() { return {Kind::Lad, 0.0}; }
  static EstimatorSpec huber(double delta);
};

// Sorted set of detected outlier indices.
struct OutlierSet {
  std::vector<int> indices;  // ascending

  bool contains(int i) const;
  bool operator==(const OutlierSet& o) const { return indices == o.indices; }
};

}  // namespace robustsi
