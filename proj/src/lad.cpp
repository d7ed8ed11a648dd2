#include "robustsi/lad.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustsi/errors.h"

namespace robustsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOptTol = 1e-9;    // reduced-cost optimality tolerance
constexpr double kPivTol = 1e-11;   // smallest usable pivot magnitude
constexpr double kMergeTol = 1e-12;

// Dense revised simplex specialized to the LAD split formulation. The basis
// matrix is refactorized after every pivot; at desk scale (n <= a few
// hundred) this is cheap and avoids update drift.
class LadSimplex {
 public:
  explicit LadSimplex(const Eigen::MatrixXd& X)
      : n_(static_cast<int>(X.rows())),
        d_(static_cast<int>(X.cols())),
        m_(2 * n_ + 2 * d_),
        S_(Eigen::MatrixXd::Zero(n_, m_)),
        q_(Eigen::VectorXd::Zero(m_)) {
    for (int i = 0; i < n_; ++i) {
      S_(i, 2 * i) = 1.0;
      S_(i, 2 * i + 1) = -1.0;
      for (int j = 0; j < d_; ++j) {
        S_(i, 2 * n_ + 2 * j) = X(i, j);
        S_(i, 2 * n_ + 2 * j + 1) = -X(i, j);
      }
    }
    q_.head(2 * n_).setOnes();
    basic_.resize(n_);
    is_basic_.assign(m_, 0);
  }

  int n() const { return n_; }
  int cols() const { return m_; }
  const std::vector<int>& basic() const { return basic_; }
  const Eigen::PartialPivLU<Eigen::MatrixXd>& factor() const { return lu_; }

  // Primal simplex from the sign basis of h: row i starts with whichever of
  // rho+_i, rho-_i matches sign(h_i), which is feasible outright.
  void solve(const Eigen::VectorXd& h) {
    for (int i = 0; i < n_; ++i) basic_[i] = (h(i) >= 0.0) ? 2 * i : 2 * i + 1;
    std::fill(is_basic_.begin(), is_basic_.end(), 0);
    for (int c : basic_) is_basic_[c] = 1;
    refactor();
    xb_ = lu_.solve(h);

    bool bland = false;
    int stalled = 0;
    const int cap = 400 + 60 * m_;
    for (int iter = 0; iter < cap; ++iter) {
      compute_reduced_costs();
      int enter = -1;
      double best = -kOptTol;
      for (int j = 0; j < m_; ++j) {
        if (is_basic_[j] || rc_(j) >= (bland ? -kOptTol : best)) continue;
        enter = j;
        if (bland) break;  // least index
        best = rc_(j);
      }
      if (enter < 0) {
        certify(h);
        return;
      }
      const Eigen::VectorXd w = lu_.solve(S_.col(enter));
      int leave = -1;
      double best_ratio = kInf;
      for (int k = 0; k < n_; ++k) {
        if (w(k) <= kPivTol) continue;
        const double ratio = std::max(xb_(k), 0.0) / w(k);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || basic_[k] < basic_[leave]))) {
          best_ratio = ratio;
          leave = k;
        }
      }
      if (leave < 0) {
        throw Unbounded("LAD LP ratio test found no blocking variable");
      }
      if (best_ratio < 1e-12) {
        if (++stalled > 4 * n_ + 20) bland = true;
      } else {
        stalled = 0;
      }
      pivot(leave, enter);
      xb_ = lu_.solve(h);
    }
    throw CycleDetected("LAD simplex exceeded its iteration cap");
  }

  // Exchange: basic position `leave` takes column `enter`.
  void pivot(int leave, int enter) {
    is_basic_[basic_[leave]] = 0;
    is_basic_[enter] = 1;
    basic_[leave] = enter;
    refactor();
  }

  void compute_reduced_costs() {
    Eigen::VectorXd qb(n_);
    for (int k = 0; k < n_; ++k) qb(k) = q_(basic_[k]);
    dual_ = lu_.transpose().solve(qb);
    rc_ = q_ - S_.transpose() * dual_;
  }

  // Affine representation of the basic values for rhs u0 + u1*z.
  void basis_lines(const Eigen::VectorXd& u0, const Eigen::VectorXd& u1,
                   Eigen::VectorXd* p, Eigen::VectorXd* s) const {
    *p = lu_.solve(u0);
    *s = lu_.solve(u1);
  }

  // Row of the basis inverse needed for the dual ratio test.
  Eigen::VectorXd inverse_row(int k) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    e(k) = 1.0;
    return lu_.transpose().solve(e);
  }

  double objective(const Eigen::VectorXd& xb) const {
    double obj = 0.0;
    for (int k = 0; k < n_; ++k) obj += q_(basic_[k]) * xb(k);
    return obj;
  }

  Eigen::VectorXd extract_beta(const Eigen::VectorXd& xb) const {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d_);
    for (int k = 0; k < n_; ++k) {
      const int c = basic_[k];
      if (c < 2 * n_) continue;
      const int j = (c - 2 * n_) / 2;
      beta(j) += (c % 2 == 0) ? xb(k) : -xb(k);
    }
    return beta;
  }

  // Sufficient condition for a unique optimum: strictly positive reduced
  // costs over the nonbasic columns. The sign-split partner of a basic
  // coefficient column always prices out to exactly zero (entering it moves
  // along a ray of the split variables without changing beta), so those
  // columns are structural and exempt.
  bool nonbasic_costs_strictly_positive() {
    compute_reduced_costs();
    for (int j = 0; j < m_; ++j) {
      if (is_basic_[j]) continue;
      if (j >= 2 * n_ && is_basic_[j ^ 1]) continue;
      if (rc_(j) <= kOptTol) return false;
    }
    return true;
  }

  const Eigen::VectorXd& reduced_costs() const { return rc_; }
  const Eigen::VectorXd& basic_values() const { return xb_; }
  const Eigen::MatrixXd& constraint_matrix() const { return S_; }
  bool is_basic(int j) const { return is_basic_[j] != 0; }
  void set_basic_values(const Eigen::VectorXd& xb) { xb_ = xb; }

 private:
  void refactor() {
    Eigen::MatrixXd B(n_, n_);
    for (int k = 0; k < n_; ++k) B.col(k) = S_.col(basic_[k]);
    lu_.compute(B);
    const Eigen::VectorXd diag = lu_.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() < 1e-14 * std::max(1.0, diag.maxCoeff())) {
      throw NumericalFailure("LAD basis matrix is numerically singular");
    }
  }

  void certify(const Eigen::VectorXd& h) {
    const double primal = objective(xb_);
    const double dual = dual_.dot(h);
    if (std::abs(primal - dual) > 1e-8 * (1.0 + std::abs(primal))) {
      throw NumericalFailure("LAD duality gap exceeds tolerance");
    }
  }

  int n_, d_, m_;
  Eigen::MatrixXd S_;
  Eigen::VectorXd q_;
  std::vector<int> basic_;
  std::vector<char> is_basic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd xb_, dual_, rc_;
};

}  // namespace

LadSolution solve_lad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw DimensionMismatch("solve_lad: X rows != |y|");
  if (X.rows() < 1) throw DimensionMismatch("solve_lad requires n >= 1");
  LadSimplex simplex(X);
  simplex.solve(y);
  LadSolution sol;
  sol.beta = simplex.extract_beta(simplex.basic_values());
  sol.objective = simplex.objective(simplex.basic_values());
  sol.unique_optimum = simplex.nonbasic_costs_strictly_positive();
  sol.basis.basic = simplex.basic();
  sol.basis.factor = simplex.factor();
  return sol;
}

PiecewisePath lad_path(const Eigen::MatrixXd& X, const DataLine& line,
                       double z_lo, double z_hi, int max_breakpoints) {
  if (!(std::isfinite(z_lo) && std::isfinite(z_hi)) || z_lo >= z_hi) {
    throw WindowTooSmall("lad_path requires a finite nonempty window");
  }
  if (line.z_obs < z_lo || line.z_obs > z_hi) {
    throw WindowTooSmall("z_obs lies outside the working window");
  }
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const int cap =
      max_breakpoints > 0 ? max_breakpoints : 10 * (n + d) * 40 + 1000;

  LadSimplex simplex(X);
  simplex.solve(line.at(z_lo));

  std::vector<double> breakpoints;
  std::vector<PathSegment> segments;
  Eigen::VectorXd p, s;
  double z_cur = z_lo;
  int pivots_at_point = 0;
  double last_event = z_lo - 1.0;

  while (true) {
    simplex.basis_lines(line.a, line.b, &p, &s);

    // Next z where a basic value p_k + s_k z reaches zero from above.
    double z_star = kInf;
    int leave = -1;
    for (int k = 0; k < simplex.n(); ++k) {
      if (s(k) >= -kPivTol) continue;
      const double t = std::max(-p(k) / s(k), z_cur);
      if (t < z_star - 1e-15 ||
          (t <= z_star + 1e-15 &&
           (leave < 0 || simplex.basic()[k] < simplex.basic()[leave]))) {
        z_star = t;
        leave = k;
      }
    }

    const double seg_end = std::min(z_star, z_hi);
    Eigen::VectorXd c = simplex.extract_beta(p);
    Eigen::VectorXd dvec = simplex.extract_beta(s);
    segments.push_back({std::move(c), std::move(dvec)});
    if (z_star >= z_hi) break;
    breakpoints.push_back(seg_end);
    if (static_cast<int>(breakpoints.size()) > cap) {
      throw CycleDetected("lad_path exceeded the breakpoint safety cap");
    }

    // Anti-cycling bookkeeping for degenerate vertices (several basic values
    // vanishing at the same z).
    if (seg_end - last_event < kMergeTol) {
      if (++pivots_at_point > 30 + 4 * n) {
        throw CycleDetected("lad_path stalled at z = " +
                            std::to_string(seg_end));
      }
    } else {
      pivots_at_point = 0;
    }
    last_event = seg_end;

    // Dual-simplex pivot: leaving row fixed, entering column by the dual
    // ratio test (Bland least-index tie-breaking throughout).
    simplex.compute_reduced_costs();
    const Eigen::VectorXd sigma = simplex.inverse_row(leave);
    const Eigen::VectorXd alpha =
        simplex.constraint_matrix().transpose() * sigma;
    int enter = -1;
    double best_ratio = kInf;
    for (int j = 0; j < simplex.cols(); ++j) {
      if (simplex.is_basic(j) || alpha(j) >= -kPivTol) continue;
      const double ratio = std::max(simplex.reduced_costs()(j), 0.0) / -alpha(j);
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && (enter < 0 || j < enter))) {
        best_ratio = ratio;
        enter = j;
      }
    }
    if (enter < 0) {
      throw NumericalFailure(
          "lad_path: dual step found no entering column (LP should remain "
          "feasible for every z)");
    }
    simplex.pivot(leave, enter);
    z_cur = seg_end;
  }

  return make_piecewise_path(z_lo, z_hi, std::move(breakpoints),
                             std::move(segments));
}

}  // namespace robustsi
