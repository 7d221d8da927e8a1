#pragma once

#include <platoonlab/cbf.hpp>
#include <platoonlab/qp.hpp>
#include <platoonlab/stability.hpp>

#include <Eigen/Dense>

#include <random>
#include <sstream>
#include <string>
#include <vector>

// Cross-validation checks pairing independent computation routes: companion
// roots vs state-matrix eigenvalues, the assembled transfer function vs the
// state-space frequency response, finite differences vs the analytic
// linearization, and the active-set QP vs exhaustive enumeration. These back
// the `validate` CLI verb and the acceptance suite.

namespace platoonlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

struct RandomPlatoon {
  PlatoonConfig cfg;
  std::vector<HvParams> hv;
  RangePolicy rp{2.0, 40.0, 40.0};
  CavGains gains;
  double v_star = 20.0;
};

inline RandomPlatoon random_platoon(std::mt19937& rng, int max_hv = 5) {
  std::uniform_real_distribution<double> pos(0.1, 0.9);
  std::uniform_real_distribution<double> gain(-0.5, 1.5);
  RandomPlatoon s;
  s.cfg.n_hv = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_hv));
  for (int i = 0; i < s.cfg.n_hv; ++i) {
    HvParams p;
    p.a = pos(rng);
    p.b = pos(rng);
    p.s_st = 1.0 + 4.0 * pos(rng);
    p.s_go = 30.0 + 20.0 * pos(rng);
    s.hv.push_back(p);
  }
  for (int i = 1; i <= s.cfg.n_hv; ++i)
    if (rng() % 2) {
      s.cfg.head_connected.insert(i);
      s.gains.beta_head_hv[i] = gain(rng);
    }
  for (int i = 1; i <= s.cfg.n_hv - 1; ++i)
    if (rng() % 2) {
      s.cfg.tail_connected.insert(i);
      s.gains.beta_tail_hv[i] = gain(rng);
    }
  s.gains.alpha_head = pos(rng);
  s.gains.beta_head_d = gain(rng);
  s.gains.beta_head_tail = gain(rng);
  s.gains.alpha_tail = pos(rng);
  s.gains.beta_tail_n = gain(rng);
  s.gains.beta_tail_head = gain(rng);
  s.v_star = 5.0 + 30.0 * pos(rng);
  return s;
}

inline TransferFunction transfer_of(const RandomPlatoon& s) {
  std::vector<HvLinearCoeffs> hc;
  for (const auto& p : s.hv)
    hc.push_back(hv_linear_coeffs(p, hv_equilibrium_gap(p, s.v_star), s.v_star));
  return build_transfer_function(hc, cav_linear_coeffs(s.gains, s.rp, s.cfg, s.v_star), s.gains,
                                 s.cfg);
}

inline double greedy_multiset_distance(std::vector<std::complex<double>> a,
                                       std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& ra : a) {
    std::size_t best_j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dist = std::abs(ra - b[j]);
      if (dist < best) {
        best = dist;
        best_j = j;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return worst;
}

} // namespace detail

/// Roots of D(s) against eigenvalues of A over randomized platoons.
/// `denominator_perturbation` injects a coefficient error; nonzero values
/// serve as a negative control that must make the check fail.
inline CheckResult check_roots_vs_eigenvalues(unsigned seed, int n_configs = 100,
                                              double denominator_perturbation = 0.0) {
  std::mt19937 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < n_configs; ++t) {
    const auto s = detail::random_platoon(rng);
    TransferFunction tf = detail::transfer_of(s);
    if (denominator_perturbation != 0.0) {
      std::vector<double> c = tf.den.coefficients();
      c[1] += denominator_perturbation;
      tf.den = RealPolynomial(c);
    }
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    const Eigen::VectorXcd eig = A.eigenvalues();
    worst = std::max(worst, detail::greedy_multiset_distance(
                                polynomial_roots(tf.den),
                                {eig.data(), eig.data() + eig.size()}));
  }
  std::ostringstream detail_os;
  detail_os << "worst multiset distance " << worst << " over " << n_configs << " configs";
  return {"roots-vs-eigenvalues", worst < 1e-6, detail_os.str()};
}

/// |N(jw)/D(jw)| against e_T^T (jwI - A)^{-1} B on a log frequency grid.
inline CheckResult check_transfer_vs_state_space(unsigned seed, int n_configs = 20,
                                                 int n_freqs = 50) {
  std::mt19937 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < n_configs; ++t) {
    const auto s = detail::random_platoon(rng);
    const TransferFunction tf = detail::transfer_of(s);
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    for (int k = 0; k < n_freqs; ++k) {
      const double omega = std::pow(10.0, -3.0 + 5.0 * k / (n_freqs - 1));
      const auto via_ss = freq_response(A, B, s.cfg.state_dim() - 1, omega);
      worst = std::max(worst, std::abs(tf.eval({0.0, omega}) - via_ss));
    }
  }
  std::ostringstream detail_os;
  detail_os << "worst response mismatch " << worst;
  return {"transfer-function-vs-state-space", worst < 1e-8, detail_os.str()};
}

/// Central finite differences of the closed loop (nominal controllers, no
/// saturation) against the analytic A and B.
inline CheckResult check_jacobian_finite_difference(unsigned seed, int n_configs = 20) {
  std::mt19937 rng(seed);
  const ActuationLimits wide{-1e9, 1e9};
  double worst = 0.0;
  for (int t = 0; t < n_configs; ++t) {
    const auto s = detail::random_platoon(rng);
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    const Eigen::VectorXd x0 = assemble_equilibrium(s.cfg, s.hv, s.rp, s.v_star).to_vector();
    auto rhs = [&](const Eigen::VectorXd& xv, double v_d) {
      const PlatoonState x = PlatoonState::from_vector(xv, s.cfg.n_hv);
      return closed_loop_rhs(x, v_d, nominal_head(x, v_d, s.gains, s.rp, s.cfg),
                             nominal_tail(x, s.gains, s.rp, s.cfg), s.hv, {}, wide);
    };
    const double h = 1e-6;
    const int n = s.cfg.state_dim();
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp(k) += h;
      xm(k) -= h;
      const Eigen::VectorXd col = (rhs(xp, s.v_star) - rhs(xm, s.v_star)) / (2.0 * h);
      worst = std::max(worst, (col - A.col(k)).lpNorm<Eigen::Infinity>());
    }
    const Eigen::VectorXd b_fd = (rhs(x0, s.v_star + h) - rhs(x0, s.v_star - h)) / (2.0 * h);
    worst = std::max(worst, (b_fd - B).lpNorm<Eigen::Infinity>());
  }
  std::ostringstream detail_os;
  detail_os << "worst entry mismatch " << worst;
  return {"jacobian-finite-difference", worst < 1e-5, detail_os.str()};
}

/// Exhaustive reference for small QPs: try every active subset as an
/// equality system and keep the best feasible candidate. Independent of the
/// active-set solver's search path.
inline double qp_enumeration_objective(const QpProblem& prob) {
  const int m = prob.dimension();
  const int n_rows = prob.n_constraints();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n_rows); ++mask) {
    std::vector<int> subset;
    for (int r = 0; r < n_rows; ++r)
      if (mask & (1u << r)) subset.push_back(r);
    const int k = static_cast<int>(subset.size());
    if (k > m) continue;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + k, m + k);
    Eigen::VectorXd rhs(m + k);
    for (int d = 0; d < m; ++d) {
      kkt(d, d) = 2.0 * prob.weights(d);
      rhs(d) = 2.0 * prob.weights(d) * prob.targets(d);
    }
    for (int j = 0; j < k; ++j) {
      kkt.block(m + j, 0, 1, m) = prob.rows.row(subset[static_cast<std::size_t>(j)]);
      kkt.block(0, m + j, m, 1) = prob.rows.row(subset[static_cast<std::size_t>(j)]).transpose();
      rhs(m + j) = prob.bounds(subset[static_cast<std::size_t>(j)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd z = sol.head(m);
    if (((prob.rows * z - prob.bounds).array() < -1e-9).any()) continue;
    best = std::min(best, prob.objective(z));
  }
  return best;
}

inline QpProblem random_qp(std::mt19937& rng, int max_dim = 6, int max_rows = 10) {
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::uniform_real_distribution<double> w(0.2, 5.0);
  QpProblem prob;
  const int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_dim));
  const int rows = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_rows));
  prob.weights = Eigen::VectorXd::NullaryExpr(m, [&](int) { return w(rng); });
  prob.targets = Eigen::VectorXd::NullaryExpr(m, [&](int) { return val(rng); });
  prob.rows = Eigen::MatrixXd::NullaryExpr(rows, m, [&](int, int) { return val(rng); });
  // bounds anchored below the target point's row values keep most problems
  // feasible; a fraction is pushed harder to exercise multi-constraint optima
  prob.bounds = prob.rows * prob.targets;
  for (int r = 0; r < rows; ++r) prob.bounds(r) += val(rng);
  return prob;
}

/// Active-set solutions against enumeration on random instances. The gap is
/// measured relative to the objective scale once it exceeds one, which is
/// what double precision supports on ill-conditioned draws.
inline CheckResult check_qp_vs_enumeration(unsigned seed, int n_instances = 500) {
  std::mt19937 rng(seed);
  double worst = 0.0;
  int solved = 0;
  for (int t = 0; t < n_instances; ++t) {
    const QpProblem prob = random_qp(rng);
    const double reference = qp_enumeration_objective(prob);
    if (!std::isfinite(reference)) continue; // infeasible draw
    const QpSolution sol = solve_qp(prob);
    const double gap = std::abs(prob.objective(sol.z) - reference) / std::max(1.0, reference);
    worst = std::max(worst, gap);
    ++solved;
  }
  std::ostringstream detail_os;
  detail_os << "worst objective gap " << worst << " on " << solved << " feasible instances";
  return {"qp-vs-enumeration", worst < 1e-6 && solved > n_instances / 2, detail_os.str()};
}

/// The constructive witness for the joint QP's hard rows over random states.
inline CheckResult check_joint_feasibility_witness(unsigned seed, int n_states = 1000) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> speed(-5.0, 45.0);
  std::uniform_real_distribution<double> gap(-5.0, 60.0);
  PlatoonConfig cfg;
  cfg.n_hv = 4;
  SafetyHeadways tau;
  CbfParams cbf;
  int failures = 0;
  for (int t = 0; t < n_states; ++t) {
    PlatoonState x;
    x.s_head = gap(rng);
    x.v_head = speed(rng);
    for (int i = 0; i < 4; ++i) {
      x.s_hv.push_back(gap(rng));
      x.v_hv.push_back(speed(rng));
    }
    x.s_tail = gap(rng);
    x.v_tail = speed(rng);
    const double v_d = speed(rng);
    const double ub_h = ub_head(x, v_d, tau.tau_head, cbf.gamma_head);
    const double ub_t = ub_tail(x, tau.tau_tail, cbf.gamma_tail);
    const double ub_p = ub_platoon(x, cfg, tau.tau_platoon, cbf.gamma_platoon);
    if (!joint_hard_rows_feasible_at_witness(ub_h, ub_t, ub_p)) ++failures;
  }
  std::ostringstream detail_os;
  detail_os << failures << " witness failures in " << n_states << " states";
  return {"joint-hard-rows-feasibility", failures == 0, detail_os.str()};
}

inline std::vector<CheckResult> run_all_checks(unsigned seed) {
  return {
      check_roots_vs_eigenvalues(seed),
      check_transfer_vs_state_space(seed + 1),
      check_jacobian_finite_difference(seed + 2),
      check_qp_vs_enumeration(seed + 3),
      check_joint_feasibility_witness(seed + 4),
  };
}

} // namespace platoonlab
