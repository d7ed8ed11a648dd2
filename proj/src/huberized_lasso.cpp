#include "robustsi/huberized_lasso.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustsi/errors.h"
#include "robustsi/linalg.h"

namespace robustsi {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double lasso_objective(const Eigen::VectorXd& res, const Eigen::VectorXd& u,
                       double lambda) {
  return 0.5 * res.squaredNorm() + lambda * u.lpNorm<1>();
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::MatrixXd> project_out_design(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw DimensionMismatch("project_out_design: X rows != |y|");
  }
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(n, n) - X * pseudo_inverse(X);
  // Symmetrize away factorization roundoff; the projector is symmetric.
  proj = 0.5 * (proj + proj.transpose());
  return {proj * y, std::move(proj)};
}

LassoSolution lasso_solve(const Eigen::VectorXd& y_tilde,
                          const Eigen::MatrixXd& proj, double lambda) {
  if (!(lambda > 0.0)) throw NumericalFailure("lasso lambda must be > 0");
  if (proj.rows() != y_tilde.size()) {
    throw DimensionMismatch("lasso_solve: proj rows != |y_tilde|");
  }
  const int n = static_cast<int>(proj.cols());
  Eigen::VectorXd colnorm2(n);
  for (int j = 0; j < n; ++j) colnorm2(j) = proj.col(j).squaredNorm();

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd res = y_tilde;
  const int max_sweeps = 100000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int j = 0; j < n; ++j) {
      if (colnorm2(j) <= 1e-14) continue;
      const double rho = proj.col(j).dot(res) + colnorm2(j) * u(j);
      const double u_new = soft_threshold(rho, lambda) / colnorm2(j);
      if (u_new != u(j)) {
        res -= proj.col(j) * (u_new - u(j));
        u(j) = u_new;
      }
    }
    // Duality gap for the current iterate.
    const double obj = lasso_objective(res, u, lambda);
    const Eigen::VectorXd corr = proj.transpose() * res;
    const double cmax = corr.cwiseAbs().maxCoeff();
    const double scale = cmax > lambda ? lambda / cmax : 1.0;
    const Eigen::VectorXd nu = scale * res;
    const double dual =
        0.5 * y_tilde.squaredNorm() - 0.5 * (nu - y_tilde).squaredNorm();
    if (obj - dual <= 1e-9 * (1.0 + std::abs(obj))) {
      LassoSolution sol;
      sol.u_hat = u;
      sol.lambda = lambda;
      sol.objective = obj;
      for (int j = 0; j < n; ++j) {
        if (u(j) != 0.0) {
          sol.active.push_back(j);
        }
      }
      sol.signs.resize(static_cast<Eigen::Index>(sol.active.size()));
      for (std::size_t k = 0; k < sol.active.size(); ++k) {
        sol.signs(k) = u(sol.active[k]) > 0.0 ? 1.0 : -1.0;
      }
      return sol;
    }
  }
  throw MaxIterations("lasso coordinate descent did not reach its gap target");
}

IntervalSet hl_truncation_interval(const LassoSolution& sol,
                                   const DataLine& line,
                                   const Eigen::MatrixXd& proj) {
  const int na = static_cast<int>(sol.active.size());
  if (na == 0) {
    throw EmptyRegion("sign-conditioned event needs a nonempty active set");
  }
  const int n = static_cast<int>(proj.rows());
  const Eigen::MatrixXd G = proj.transpose() * proj;
  const Eigen::VectorXd c0 = G * line.a;
  const Eigen::VectorXd c1 = G * line.b;

  Eigen::MatrixXd G_AA(na, na);
  Eigen::MatrixXd G_all_A(n, na);
  Eigen::VectorXd c0_A(na), c1_A(na);
  for (int k = 0; k < na; ++k) {
    G_all_A.col(k) = G.col(sol.active[k]);
    c0_A(k) = c0(sol.active[k]);
    c1_A(k) = c1(sol.active[k]);
    for (int l = 0; l < na; ++l) G_AA(k, l) = G(sol.active[k], sol.active[l]);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(G_AA);
  if (cod.rank() < na) {
    throw NonUniqueActiveBlock(
        "active submatrix of the projected design is rank-deficient");
  }
  const Eigen::VectorXd mu0 = cod.solve(c0_A - sol.lambda * sol.signs);
  const Eigen::VectorXd mu1 = cod.solve(c1_A);
  const Eigen::VectorXd w0 = c0 - G_all_A * mu0;
  const Eigen::VectorXd w1 = c1 - G_all_A * mu1;

  // Intersect the affine inequalities q0 + q1 z >= 0 into [lo, hi].
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double coeff_scale = 1e-12 * (1.0 + mu1.cwiseAbs().maxCoeff() +
                                w1.cwiseAbs().maxCoeff());
  const auto clip = [&](double q0, double q1) {
    if (q1 > coeff_scale) {
      lo = std::max(lo, -q0 / q1);
    } else if (q1 < -coeff_scale) {
      hi = std::min(hi, -q0 / q1);
    } else if (q0 < -1e-9 * (1.0 + sol.lambda)) {
      throw EmptyRegion("sign-conditioned event infeasible along the line");
    }
  };
  for (int k = 0; k < na; ++k) {
    clip(sol.signs(k) * mu0(k), sol.signs(k) * mu1(k));
  }
  std::vector<char> is_active(n, 0);
  for (int j : sol.active) is_active[j] = 1;
  for (int j = 0; j < n; ++j) {
    if (is_active[j]) continue;
    clip(sol.lambda - w0(j), -w1(j));
    clip(sol.lambda + w0(j), w1(j));
  }
  if (lo > hi) {
    throw EmptyRegion("sign-conditioned interval collapsed");
  }
  IntervalSet interval(lo, hi);
  if (!interval.contains(line.z_obs)) {
    throw EmptyRegion(
        "z_obs escaped its own sign-conditioned interval (active set or "
        "signs not reproduced)");
  }
  return interval;
}

double hl_p_value(const TestDirection& dir, const IntervalSet& interval,
                  double z_obs) {
  return selective_p(dir, interval, z_obs);
}

}  // namespace robustsi
