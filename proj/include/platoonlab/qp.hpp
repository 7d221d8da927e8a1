#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Small dense strictly convex QP with a separable quadratic objective:
//
//   minimize   sum_k w_k (z_k - t_k)^2
//   subject to a_r . z >= c_r
//
// solved by a dual active-set method: start at the unconstrained optimum and
// add violated constraints one at a time, taking partial steps that keep the
// active multipliers nonnegative (constraints whose multiplier would cross
// zero are dropped). Ties are broken by smallest constraint index.

namespace platoonlab {

struct QpProblem {
  Eigen::VectorXd weights; // strictly positive
  Eigen::VectorXd targets;
  Eigen::MatrixXd rows;    // one constraint per row
  Eigen::VectorXd bounds;  // rows * z >= bounds

  int dimension() const { return static_cast<int>(weights.size()); }
  int n_constraints() const { return static_cast<int>(bounds.size()); }

  double objective(const Eigen::VectorXd& z) const {
    return (weights.array() * (z - targets).array().square()).sum();
  }

  void validate() const {
    if (weights.size() != targets.size())
      throw std::invalid_argument("qp: weights/targets size mismatch");
    if ((weights.array() <= 0.0).any())
      throw std::invalid_argument("qp: weights must be strictly positive");
    if (rows.rows() != bounds.size() || (rows.cols() != dimension() && rows.rows() > 0))
      throw std::invalid_argument("qp: constraint shape mismatch");
    if (!weights.allFinite() || !targets.allFinite() || !rows.allFinite() || !bounds.allFinite())
      throw std::invalid_argument("qp: non-finite problem data");
  }
};

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd duals;    // one per constraint, zero when inactive
  std::vector<int> active;  // indices of active constraints, ascending
};

inline QpSolution solve_qp(const QpProblem& prob) {
  prob.validate();
  const int m = prob.dimension();
  const int n_rows = prob.n_constraints();
  const Eigen::ArrayXd g_inv = 0.5 / prob.weights.array(); // G = 2 diag(w)

  Eigen::VectorXd z = prob.targets;
  std::vector<int> active;
  std::vector<double> duals;

  const double feas_tol = 1e-11;
  const int max_iter = 100 * (n_rows + 1);

  auto violation = [&](int r) { return prob.bounds(r) - prob.rows.row(r).dot(z); };

  int iter = 0;
  while (true) {
    if (++iter > max_iter)
      throw std::runtime_error("solve_qp: iteration cap reached (cycling or ill-posed problem)");

    int p = -1;
    double worst = feas_tol;
    for (int r = 0; r < n_rows; ++r) {
      const bool is_active =
          std::find(active.begin(), active.end(), r) != active.end();
      if (is_active) continue;
      const double v = violation(r);
      if (v > worst) {
        worst = v;
        p = r;
      }
    }
    if (p < 0) break;

    const Eigen::VectorXd n_plus = prob.rows.row(p).transpose();
    const double dn_scale = n_plus.dot((g_inv * n_plus.array()).matrix());
    double u_plus = 0.0;

    // take partial steps toward constraint p, shedding blocking constraints
    while (true) {
      if (++iter > max_iter)
        throw std::runtime_error("solve_qp: iteration cap reached (cycling or ill-posed problem)");

      const int k = static_cast<int>(active.size());
      Eigen::VectorXd r_step(k);
      Eigen::VectorXd d(m);
      if (k == 0) {
        d = (g_inv * n_plus.array()).matrix();
      } else {
        Eigen::MatrixXd N(m, k);
        for (int j = 0; j < k; ++j) N.col(j) = prob.rows.row(active[static_cast<std::size_t>(j)]).transpose();
        const Eigen::MatrixXd Ginv_N = (N.array().colwise() * g_inv).matrix();
        const Eigen::MatrixXd M = N.transpose() * Ginv_N;
        r_step = M.ldlt().solve(Ginv_N.transpose() * n_plus);
        d = (g_inv * (n_plus - N * r_step).array()).matrix();
      }

      // longest step keeping active duals nonnegative
      double t1 = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (int j = 0; j < k; ++j) {
        if (r_step(j) > 1e-12) {
          const double cand = duals[static_cast<std::size_t>(j)] / r_step(j);
          if (cand < t1 - 1e-15 ||
              (cand < t1 + 1e-15 && (drop < 0 || active[static_cast<std::size_t>(j)] <
                                                      active[static_cast<std::size_t>(drop)]))) {
            t1 = cand;
            drop = j;
          }
        }
      }

      // step to make constraint p tight; n_plus counts as dependent on the
      // active normals when its reduced component is negligible
      const double dn = n_plus.dot(d);
      const bool dependent = dn <= 1e-10 * std::max(dn_scale, 1e-300);
      const double t2 = dependent ? std::numeric_limits<double>::infinity() : violation(p) / dn;

      const double t = std::min(t1, t2);
      if (!std::isfinite(t))
        throw std::runtime_error("solve_qp: infeasible constraint set");

      if (!dependent) z += t * d; // otherwise the step moves only the duals
      for (int j = 0; j < k; ++j) duals[static_cast<std::size_t>(j)] -= t * r_step(j);
      u_plus += t;

      if (t2 <= t1) {
        // p joins the active set, keep indices ascending
        const auto pos = std::lower_bound(active.begin(), active.end(), p);
        duals.insert(duals.begin() + (pos - active.begin()), u_plus);
        active.insert(pos, p);
        break;
      }
      active.erase(active.begin() + drop);
      duals.erase(duals.begin() + drop);
    }
  }

  QpSolution sol;
  sol.z = z;
  sol.duals = Eigen::VectorXd::Zero(n_rows);
  for (std::size_t j = 0; j < active.size(); ++j)
    sol.duals(active[j]) = duals[j];
  sol.active = active;
  return sol;
}

} // namespace platoonlab
