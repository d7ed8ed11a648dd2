#pragma once

// Test-only lasso oracle: plain proximal gradient (ISTA) with a subgradient
// optimality check, independent of the library's coordinate descent.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace oracles {

struct ProxLassoResult {
  Eigen::VectorXd u;
  double objective;
};

inline ProxLassoResult prox_lasso(const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& A, double lambda,
                                  int max_iters = 200000) {
  const Eigen::MatrixXd G = A.transpose() * A;
  // Lipschitz constant of the smooth part via a few power iterations.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
  double L = 1.0;
  for (int it = 0; it < 200; ++it) {
    v = (G * v).normalized();
    L = v.dot(G * v);
  }
  L = std::max(L * 1.01, 1e-8);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(A.cols());
  const Eigen::VectorXd Aty = A.transpose() * y;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd grad = G * u - Aty;
    Eigen::VectorXd next = u - grad / L;
    for (Eigen::Index j = 0; j < next.size(); ++j) {
      const double t = lambda / L;
      next(j) = next(j) > t ? next(j) - t : (next(j) < -t ? next(j) + t : 0.0);
    }
    const double change = (next - u).cwiseAbs().maxCoeff();
    u = next;
    if (change < 1e-14) break;
  }
  // Subgradient verification.
  const Eigen::VectorXd g = A.transpose() * (A * u - y);
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u(j) == 0.0) {
      if (std::abs(g(j)) > lambda + 1e-6) {
        throw std::runtime_error("prox oracle failed subgradient check");
      }
    } else if (std::abs(g(j) + lambda * (u(j) > 0 ? 1.0 : -1.0)) > 1e-6) {
      throw std::runtime_error("prox oracle failed stationarity check");
    }
  }
  ProxLassoResult res;
  res.objective = 0.5 * (y - A * u).squaredNorm() + lambda * u.lpNorm<1>();
  res.u = std::move(u);
  return res;
}

}  // namespace oracles
