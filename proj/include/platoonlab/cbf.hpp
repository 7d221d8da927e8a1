#pragma once

#include <platoonlab/platoon.hpp>
#include <platoonlab/qp.hpp>
#include <platoonlab/safety.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

// Control-barrier-function input bounds for the two CAVs, the min-form
// safety filters, the relaxed head-CAV QP, and the joint two-CAV QP with the
// platoon constraint. Bounds implement the conditions h_dot >= -gamma h made
// explicit in the control input.

namespace platoonlab {

/// Barrier parameters for one head-connected HV.
struct HvCbfParams {
  double tau = 1.0;      // HV safe time headway [s]
  double gamma = 5.0;    // barrier rate [1/s]
  double eta = 0.5;      // weight of the head CAV margin inside h_bar
  double penalty = 100.0; // slack penalty p_i
  double d_bar = 0.0;    // model-error bound for the robust variant [m/s^2]
};

struct CbfParams {
  double gamma_head = 5.0;
  double gamma_tail = 5.0;
  double gamma_platoon = 5.0;
  std::map<int, HvCbfParams> hv; // keyed by head-connected HV index
};

/// Upper bound on u_H from the head CAV's own headway barrier.
inline double ub_head(const PlatoonState& x, double v_d, double tau_head, double gamma_head) {
  return (v_d - x.v_head) / tau_head + gamma_head * (x.s_head / tau_head - x.v_head);
}

/// Upper bound on u_T; the tail CAV measures HV-N directly.
inline double ub_tail(const PlatoonState& x, double tau_tail, double gamma_tail) {
  return (x.v(x.n_hv()) - x.v_tail) / tau_tail + gamma_tail * (x.s_tail / tau_tail - x.v_tail);
}

/// Lower bound on u_H that protects head-connected HV-i through the
/// composite barrier h_i - eta_i h_H. The HV acceleration model enters here,
/// so an inaccurate model shifts this bound.
inline double lb_hv(const PlatoonState& x, int i, double v_d, const HvParams& model,
                    const HvCbfParams& p, double tau_head) {
  const double s_dot = x.v_pred(i) - x.v(i);
  const double f_i = ovm_accel(model, x.s(i), x.v(i), s_dot);
  return (v_d - x.v_head) / tau_head + p.gamma * (x.s_head / tau_head - x.v_head) +
         (p.tau / (p.eta * tau_head)) *
             (f_i - s_dot / p.tau - p.gamma * (x.s(i) / p.tau - x.v(i)));
}

/// Additive margin absorbing a bounded HV model error |d_i| <= d_bar.
inline double robust_margin(const HvCbfParams& p, double tau_head) {
  return p.tau * p.d_bar / (p.eta * tau_head);
}

inline double robust_lb_hv(const PlatoonState& x, int i, double v_d, const HvParams& model,
                           const HvCbfParams& p, double tau_head) {
  return lb_hv(x, i, v_d, model, p, tau_head) + robust_margin(p, tau_head);
}

/// Upper bound on u_T - u_H from the platoon-length barrier.
inline double ub_platoon(const PlatoonState& x, const PlatoonConfig& cfg, double tau_p,
                         double gamma_p) {
  const double s_ht = gap_between_cavs(x, cfg);
  return (x.v_head - x.v_tail) / tau_p +
         gamma_p * ((s_ht - cfg.platoon_base_length) / tau_p - (x.v_tail - x.v_head));
}

inline double filter_head_min(double k_nominal, double ub) { return std::min(k_nominal, ub); }
inline double filter_tail_min(double k_nominal, double ub) { return std::min(k_nominal, ub); }

struct HeadQpResult {
  double u_head = 0;
  std::map<int, double> slacks;
};

/// Head-CAV filter with hard CAV safety and soft HV safety. Solved exactly:
/// the optimal slack is sigma_i = max(0, c_i (lb_i - u)) with c_i = eta_i
/// tau_H, which reduces the QP to a convex piecewise quadratic in u alone;
/// its minimizer is found by scanning the breakpoints and then clipped to
/// the hard bound.
inline HeadQpResult qp_head_from_bounds(double k_nominal, double ub,
                                        const std::map<int, double>& lower_bounds,
                                        const std::map<int, HvCbfParams>& params,
                                        double tau_head) {
  std::vector<double> breaks;
  for (const auto& [i, lb] : lower_bounds) breaks.push_back(lb);
  std::sort(breaks.begin(), breaks.end());

  auto minimizer_on = [&](double lo, double hi) {
    // phi(u) = (u - k_n)^2 + sum_{lb_i > u} p_i c_i^2 (lb_i - u)^2 is smooth
    // on (lo, hi); stationary point from phi'(u) = 0
    double denom = 1.0, numer = k_nominal;
    for (const auto& [i, lb] : lower_bounds) {
      if (lb > lo) { // active on this interval (lb >= hi > u)
        const auto& p = params.at(i);
        const double w = p.penalty * p.eta * tau_head * p.eta * tau_head;
        denom += w;
        numer += w * lb;
      }
    }
    const double u = numer / denom;
    return std::clamp(u, lo, hi);
  };

  auto phi = [&](double u) {
    double val = (u - k_nominal) * (u - k_nominal);
    for (const auto& [i, lb] : lower_bounds) {
      const auto& p = params.at(i);
      const double s = std::max(0.0, p.eta * tau_head * (lb - u));
      val += p.penalty * s * s;
    }
    return val;
  };

  double best_u = minimizer_on(breaks.empty() ? -1e300 : breaks.back(), 1e300);
  double best_val = phi(best_u);
  double hi = breaks.empty() ? 0.0 : breaks.back();
  for (int j = static_cast<int>(breaks.size()) - 1; j >= 0; --j) {
    const double lo = (j == 0) ? -1e300 : breaks[static_cast<std::size_t>(j - 1)];
    const double u = minimizer_on(lo, hi);
    const double val = phi(u);
    if (val < best_val) {
      best_val = val;
      best_u = u;
    }
    hi = lo;
  }

  HeadQpResult res;
  res.u_head = std::min(best_u, ub);
  for (const auto& [i, lb] : lower_bounds) {
    const auto& p = params.at(i);
    res.slacks[i] = std::max(0.0, p.eta * tau_head * (lb - res.u_head));
  }
  return res;
}

/// State-level head-CAV QP over the connected set; reduces to the min filter
/// when no HVs are connected.
inline HeadQpResult qp_head(const PlatoonState& x, double v_d, double k_nominal,
                            const std::vector<HvParams>& design_models, const CbfParams& cbf,
                            const SafetyHeadways& tau, const std::set<int>& connected,
                            bool robust = false) {
  std::map<int, double> lbs;
  for (int i : connected) {
    const auto& p = cbf.hv.at(i);
    const auto& model = design_models.at(static_cast<std::size_t>(i - 1));
    lbs[i] = robust ? robust_lb_hv(x, i, v_d, model, p, tau.tau_head)
                    : lb_hv(x, i, v_d, model, p, tau.tau_head);
  }
  return qp_head_from_bounds(k_nominal, ub_head(x, v_d, tau.tau_head, cbf.gamma_head), lbs,
                             cbf.hv, tau.tau_head);
}

struct FilterDecision {
  double u_head = 0, u_tail = 0;
  std::map<int, double> slacks;
  std::vector<int> active;    // active constraint rows of the joint QP
  bool fallback = false;      // never set by the solver; reserved for callers
};

/// Joint two-CAV QP: hard CAV and platoon rows, soft HV rows. Decision
/// variables are (u_H, u_T, sigma_1..sigma_k) with k connected HVs.
inline FilterDecision qp_joint_from_bounds(double k_nom_head, double k_nom_tail, double ub_h,
                                           double ub_t, double ub_p,
                                           const std::map<int, double>& lower_bounds,
                                           const std::map<int, HvCbfParams>& params,
                                           double tau_head) {
  const int k = static_cast<int>(lower_bounds.size());
  const int m = 2 + k;
  QpProblem prob;
  prob.weights = Eigen::VectorXd::Ones(m);
  prob.targets = Eigen::VectorXd::Zero(m);
  prob.targets(0) = k_nom_head;
  prob.targets(1) = k_nom_tail;
  prob.rows = Eigen::MatrixXd::Zero(3 + 2 * k, m);
  prob.bounds = Eigen::VectorXd::Zero(3 + 2 * k);

  prob.rows(0, 0) = -1.0; // u_H <= ub_h
  prob.bounds(0) = -ub_h;
  prob.rows(1, 1) = -1.0; // u_T <= ub_t
  prob.bounds(1) = -ub_t;
  prob.rows(2, 0) = 1.0;  // u_T - u_H <= ub_p
  prob.rows(2, 1) = -1.0;
  prob.bounds(2) = -ub_p;

  int col = 2, row = 3;
  std::vector<int> order;
  for (const auto& [i, lb] : lower_bounds) {
    const auto& p = params.at(i);
    const double c = p.eta * tau_head;
    prob.weights(col) = p.penalty;
    prob.rows(row, 0) = c; // c u_H + sigma_i >= c lb_i
    prob.rows(row, col) = 1.0;
    prob.bounds(row) = c * lb;
    ++row;
    prob.rows(row, col) = 1.0; // sigma_i >= 0
    ++row;
    order.push_back(i);
    ++col;
  }

  const QpSolution sol = solve_qp(prob);
  FilterDecision dec;
  dec.u_head = sol.z(0);
  dec.u_tail = sol.z(1);
  for (int j = 0; j < k; ++j) dec.slacks[order[static_cast<std::size_t>(j)]] = sol.z(2 + j);
  dec.active = sol.active;
  return dec;
}

inline FilterDecision qp_joint(const PlatoonState& x, double v_d, double k_nom_head,
                               double k_nom_tail, const std::vector<HvParams>& design_models,
                               const CbfParams& cbf, const SafetyHeadways& tau,
                               const PlatoonConfig& cfg, const std::set<int>& connected,
                               bool robust = false) {
  std::map<int, double> lbs;
  for (int i : connected) {
    const auto& p = cbf.hv.at(i);
    const auto& model = design_models.at(static_cast<std::size_t>(i - 1));
    lbs[i] = robust ? robust_lb_hv(x, i, v_d, model, p, tau.tau_head)
                    : lb_hv(x, i, v_d, model, p, tau.tau_head);
  }
  return qp_joint_from_bounds(k_nom_head, k_nom_tail,
                              ub_head(x, v_d, tau.tau_head, cbf.gamma_head),
                              ub_tail(x, tau.tau_tail, cbf.gamma_tail),
                              ub_platoon(x, cfg, tau.tau_platoon, cbf.gamma_platoon), lbs,
                              cbf.hv, tau.tau_head);
}

/// Constructive feasibility witness for the three hard rows: the point
/// (ub_h, min(ub_t, ub_p + ub_h)) always satisfies them.
inline bool joint_hard_rows_feasible_at_witness(double ub_h, double ub_t, double ub_p) {
  const double u_h = ub_h;
  const double u_t = std::min(ub_t, ub_p + u_h);
  return u_h <= ub_h + 1e-12 && u_t <= ub_t + 1e-12 && u_t - u_h <= ub_p + 1e-12;
}

} // namespace platoonlab
