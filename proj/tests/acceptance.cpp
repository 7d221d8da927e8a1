// Acceptance suite: end-to-end checks of the study's headline numbers and
// the cross-route equivalences, one pass/fail line per criterion. Exits
// nonzero if any criterion fails.

#include <platoonlab/config.hpp>
#include <platoonlab/simulate.hpp>
#include <platoonlab/validate.hpp>

#include <chrono>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace platoonlab;

namespace {

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentParams baseline_params() {
  ExperimentParams par;
  par.cfg.n_hv = 4;
  par.hv = std::vector<HvParams>(4, HvParams{});
  par.gains.beta_head_tail = 0.5;
  par.gains.beta_tail_head = 1.2;
  return par;
}

Scenario braking_scenario() {
  Scenario sc;
  sc.kind = Scenario::Kind::HeadHvDecel;
  sc.accel = 5.0;
  sc.delta_v = 20.0;
  return sc;
}

Criterion criterion_1_index_reproduction() {
  Criterion c{"1 string-stability index reproduction"};
  const ExperimentParams par = baseline_params();
  const Scenario sc = braking_scenario();

  auto t0 = std::chrono::steady_clock::now();
  const Metrics nominal = run_experiment(par, sc, ControllerMode::Nominal).second;
  const double t_nominal = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const Metrics filtered = run_experiment(par, sc, ControllerMode::CbfCav).second;
  const double t_filtered = seconds_since(t0);

  std::ostringstream os;
  os << "I_nominal = " << *nominal.I << " (target 0.589 +/- 0.05), I_cbf = " << *filtered.I
     << " (target 0.698 +/- 0.05), runtimes " << std::setprecision(2) << t_nominal << " s / "
     << t_filtered << " s";
  c.detail = os.str();
  c.pass = std::abs(*nominal.I - 0.589) <= 0.05 && std::abs(*filtered.I - 0.698) <= 0.05 &&
           t_nominal < 10.0 && t_filtered < 10.0;
  return c;
}

Criterion criterion_2_platoon_safety_effect() {
  Criterion c{"2 platoon-safety effect on the tail CAV"};
  const ExperimentParams par = baseline_params();
  const Scenario sc = braking_scenario();
  const Metrics joint = run_experiment(par, sc, ControllerMode::CbfFull).second;
  const Metrics separate = run_experiment(par, sc, ControllerMode::CbfCav).second;

  std::ostringstream os;
  os << "I_full = " << *joint.I << " (target 0.679 +/- 0.05), min u_T = "
     << joint.min_u_tail_applied << " (target [-4.5, -3.5]) vs " << separate.min_u_tail_applied
     << " without the platoon row (<= -4.7)";
  c.detail = os.str();
  c.pass = std::abs(*joint.I - 0.679) <= 0.05 && joint.min_u_tail_applied >= -4.5 &&
           joint.min_u_tail_applied <= -3.5 && separate.min_u_tail_applied <= -4.7;
  return c;
}

Criterion criterion_3_safety_enforcement() {
  Criterion c{"3 safety enforcement across the three scenarios"};
  ExperimentParams par = baseline_params();

  Scenario sc2;
  sc2.kind = Scenario::Kind::MiddleHvDecel;
  sc2.hv_index = 4;
  sc2.accel = 5.0;
  sc2.delta_v = 20.0;

  ExperimentParams par3 = par;
  par3.cfg.head_connected = {1};
  par3.gains.beta_head_hv[1] = 0.1;
  par3.cbf.hv[1] = HvCbfParams{};
  Scenario sc3;
  sc3.kind = Scenario::Kind::MiddleHvAccel;
  sc3.hv_index = 1;
  sc3.accel = 5.0;
  sc3.delta_v = 13.0;

  const Metrics cbf1 = run_experiment(par, braking_scenario(), ControllerMode::CbfCav).second;
  const Metrics cbf2 = run_experiment(par, sc2, ControllerMode::CbfCav).second;
  const Metrics cbf3 = run_experiment(par3, sc3, ControllerMode::CbfCavHv).second;
  const Metrics nom1 = run_experiment(par, braking_scenario(), ControllerMode::Nominal).second;
  const Metrics nom2 = run_experiment(par, sc2, ControllerMode::Nominal).second;
  const Metrics nom3 = run_experiment(par3, sc3, ControllerMode::Nominal).second;

  auto enforced_ok = [](const Metrics& m) {
    return m.min_h.at("head") >= -1e-3 && m.min_h.at("tail") >= -1e-3 && !m.collision;
  };
  const bool cbf_ok = enforced_ok(cbf1) && enforced_ok(cbf2) && enforced_ok(cbf3);
  const bool nominal_reproduces = nom1.min_h.at("head") < 0.0 && nom1.min_h.at("tail") < 0.0 &&
                                  nom2.min_h.at("tail") < 0.0 && nom3.min_h.at("hv_1") < 0.0;

  std::ostringstream os;
  os << "filtered min(h_H, h_T): [" << std::min(cbf1.min_h.at("head"), cbf1.min_h.at("tail"))
     << ", " << std::min(cbf2.min_h.at("head"), cbf2.min_h.at("tail")) << ", "
     << std::min(cbf3.min_h.at("head"), cbf3.min_h.at("tail"))
     << "]; nominal violations h_H/h_T/h_T/h_1: " << nom1.min_h.at("head") << "/"
     << nom1.min_h.at("tail") << "/" << nom2.min_h.at("tail") << "/" << nom3.min_h.at("hv_1");
  c.detail = os.str();
  c.pass = cbf_ok && nominal_reproduces;
  return c;
}

Criterion criterion_4_stability_chart() {
  Criterion c{"4 stability-chart spot checks and runtime"};
  PlatoonConfig cfg;
  cfg.n_hv = 4;
  const std::vector<HvParams> hv(4, HvParams{});
  const RangePolicy rp;
  CavGains acc_only;
  acc_only.beta_head_tail = 0.0;
  acc_only.beta_tail_head = 0.0;

  const auto t0 = std::chrono::steady_clock::now();
  const StabilityChart chart = stability_chart({-1.0, 2.0, 61}, {-1.0, 3.0, 61}, acc_only, cfg,
                                               hv, rp, 20.0, 4);
  const double chart_time = seconds_since(t0);

  // grid indices of the origin: x = -1 + 0.05 k, y = -1 + (1/15) k
  const int ix0 = 20, iy0 = 15;
  const bool origin_ok =
      chart.at(ix0, iy0).plant_stable && !chart.at(ix0, iy0).string_stable;
  bool some_cooperative_cell = false;
  for (int iy = iy0 + 1; iy < 61; ++iy)
    some_cooperative_cell = some_cooperative_cell || chart.at(ix0, iy).string_stable;

  PlatoonConfig cfg_b = cfg;
  cfg_b.tail_connected = {1, 2, 3};
  CavGains look_ahead = acc_only;
  look_ahead.beta_tail_hv = {{1, 0.4}, {2, 0.5}, {3, 0.5}};
  std::vector<HvLinearCoeffs> hc;
  for (const auto& p : hv) hc.push_back(hv_linear_coeffs(p, hv_equilibrium_gap(p, 20.0), 20.0));
  const TransferFunction tf_b =
      build_transfer_function(hc, cav_linear_coeffs(look_ahead, rp, cfg_b, 20.0), look_ahead,
                              cfg_b);
  const bool look_ahead_ok = plant_stable(tf_b) && string_stable(tf_b);

  std::ostringstream os;
  os << "origin plant-stable/string-unstable: " << origin_ok
     << ", cooperative cell on the beta_tail_head axis: " << some_cooperative_cell
     << ", look-ahead origin stable: " << look_ahead_ok << ", 61x61 chart in " << chart_time
     << " s";
  c.detail = os.str();
  c.pass = origin_ok && some_cooperative_cell && look_ahead_ok && chart_time < 120.0;
  return c;
}

Criterion criterion_5_analytic_oracles() {
  Criterion c{"5 analytic-oracle equivalence"};
  const CheckResult roots = check_roots_vs_eigenvalues(1001, 100);
  const CheckResult freq = check_transfer_vs_state_space(1002, 20, 50);
  const CheckResult jac = check_jacobian_finite_difference(1003, 20);

  // |G(0)| = 1 exactly, as the ratio of constant coefficients
  std::mt19937 rng(1004);
  bool unit_gain = true;
  for (int t = 0; t < 100; ++t) {
    const auto s = detail::random_platoon(rng);
    const TransferFunction tf = detail::transfer_of(s);
    unit_gain = unit_gain && (tf.num[0] / tf.den[0] == 1.0);
  }

  std::ostringstream os;
  os << roots.detail << "; " << freq.detail << "; " << jac.detail
     << "; unit static gain exact: " << (unit_gain ? "yes" : "no");
  c.detail = os.str();
  c.pass = roots.pass && freq.pass && jac.pass && unit_gain;
  return c;
}

// independent lift of the head QP to the generic form for the enumeration
QpProblem lift_head_qp(double k_n, double ub, const std::map<int, double>& lbs,
                       const std::map<int, HvCbfParams>& params, double tau_head) {
  const int k = static_cast<int>(lbs.size());
  QpProblem prob;
  prob.weights = Eigen::VectorXd::Ones(1 + k);
  prob.targets = Eigen::VectorXd::Zero(1 + k);
  prob.targets(0) = k_n;
  prob.rows = Eigen::MatrixXd::Zero(1 + 2 * k, 1 + k);
  prob.bounds = Eigen::VectorXd::Zero(1 + 2 * k);
  prob.rows(0, 0) = -1.0;
  prob.bounds(0) = -ub;
  int col = 1, row = 1;
  for (const auto& [i, lb] : lbs) {
    const double ci = params.at(i).eta * tau_head;
    prob.weights(col) = params.at(i).penalty;
    prob.rows(row, 0) = ci;
    prob.rows(row, col) = 1.0;
    prob.bounds(row) = ci * lb;
    ++row;
    prob.rows(row, col) = 1.0;
    ++row;
    ++col;
  }
  return prob;
}

Criterion criterion_6_qp_correctness() {
  Criterion c{"6 QP correctness against enumeration and the feasibility witness"};
  std::mt19937 rng(2001);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_real_distribution<double> pen(1.0, 300.0);
  std::uniform_real_distribution<double> eta(0.2, 1.0);

  double worst_head = 0.0;
  for (int t = 0; t < 250; ++t) {
    const double k_n = val(rng), ub = val(rng);
    std::map<int, double> lbs;
    std::map<int, HvCbfParams> params;
    const int k = 1 + static_cast<int>(rng() % 3u);
    for (int i = 1; i <= k; ++i) {
      lbs[i] = val(rng);
      HvCbfParams p;
      p.eta = eta(rng);
      p.penalty = pen(rng);
      params[i] = p;
    }
    const HeadQpResult got = qp_head_from_bounds(k_n, ub, lbs, params, 0.8);
    double objective = (got.u_head - k_n) * (got.u_head - k_n);
    for (const auto& [i, s] : got.slacks) objective += params.at(i).penalty * s * s;
    const double reference = qp_enumeration_objective(lift_head_qp(k_n, ub, lbs, params, 0.8));
    worst_head = std::max(worst_head,
                          std::abs(objective - reference) / std::max(1.0, reference));
  }

  double worst_joint = 0.0;
  std::uniform_real_distribution<double> bound(-20.0, 20.0);
  for (int t = 0; t < 250; ++t) {
    const double ub_h = bound(rng), ub_t = bound(rng), ub_p = bound(rng);
    const double knh = val(rng), knt = val(rng);
    std::map<int, double> lbs;
    std::map<int, HvCbfParams> params;
    const int k = static_cast<int>(rng() % 3u);
    for (int i = 1; i <= k; ++i) {
      lbs[i] = val(rng);
      HvCbfParams p;
      p.eta = eta(rng);
      p.penalty = pen(rng);
      params[i] = p;
    }
    const FilterDecision dec =
        qp_joint_from_bounds(knh, knt, ub_h, ub_t, ub_p, lbs, params, 0.8);
    double objective = (dec.u_head - knh) * (dec.u_head - knh) +
                       (dec.u_tail - knt) * (dec.u_tail - knt);
    for (const auto& [i, s] : dec.slacks) objective += params.at(i).penalty * s * s;

    QpProblem lifted;
    const int m = 2 + k;
    lifted.weights = Eigen::VectorXd::Ones(m);
    lifted.targets = Eigen::VectorXd::Zero(m);
    lifted.targets(0) = knh;
    lifted.targets(1) = knt;
    lifted.rows = Eigen::MatrixXd::Zero(3 + 2 * k, m);
    lifted.bounds = Eigen::VectorXd::Zero(3 + 2 * k);
    lifted.rows(0, 0) = -1.0;
    lifted.bounds(0) = -ub_h;
    lifted.rows(1, 1) = -1.0;
    lifted.bounds(1) = -ub_t;
    lifted.rows(2, 0) = 1.0;
    lifted.rows(2, 1) = -1.0;
    lifted.bounds(2) = -ub_p;
    int col = 2, row = 3;
    for (const auto& [i, lb] : lbs) {
      const double ci = params.at(i).eta * 0.8;
      lifted.weights(col) = params.at(i).penalty;
      lifted.rows(row, 0) = ci;
      lifted.rows(row, col) = 1.0;
      lifted.bounds(row) = ci * lb;
      ++row;
      lifted.rows(row, col) = 1.0;
      ++row;
      ++col;
    }
    const double reference = qp_enumeration_objective(lifted);
    worst_joint = std::max(worst_joint,
                           std::abs(objective - reference) / std::max(1.0, reference));
  }

  const CheckResult witness = check_joint_feasibility_witness(2002, 1000);

  std::ostringstream os;
  os << "head QP gap " << worst_head << ", joint QP gap " << worst_joint << "; " << witness.detail;
  c.detail = os.str();
  c.pass = worst_head < 1e-6 && worst_joint < 1e-6 && witness.pass;
  return c;
}

Criterion criterion_7_certificates() {
  Criterion c{"7 certified gains satisfy the boundary condition"};
  PlatoonConfig cfg;
  cfg.n_hv = 4;
  cfg.head_connected = {2};
  cfg.tail_connected = {1};
  const RangePolicy rp;
  const double tau = 0.8;
  std::mt19937 rng(3001);
  std::uniform_real_distribution<double> speed(0.0, 40.0);
  std::uniform_real_distribution<double> gap(2.0, 40.0);
  std::uniform_real_distribution<double> beta(-1.2, 1.2);
  std::uniform_real_distribution<double> slack(0.0, 8.0);

  int head_checked = 0, tail_checked = 0, violations = 0;
  while (head_checked < 200 || tail_checked < 200) {
    PlatoonState x;
    x.v_head = speed(rng);
    x.s_head = gap(rng);
    for (int i = 0; i < 4; ++i) {
      x.s_hv.push_back(gap(rng));
      x.v_hv.push_back(speed(rng));
    }
    x.v_tail = speed(rng);
    x.s_tail = gap(rng);
    const double v_d = speed(rng);

    CavGains g;
    g.beta_head_d = beta(rng);
    g.beta_head_tail = beta(rng);
    g.beta_head_hv[2] = beta(rng);
    g.beta_tail_n = beta(rng);
    g.beta_tail_head = beta(rng);
    g.beta_tail_hv[1] = beta(rng);
    const double need_head =
        (std::abs(1.0 - tau * g.beta_head_d) + tau * std::abs(g.beta_head_hv[2]) +
         tau * std::abs(g.beta_head_tail)) *
        rp.v_max / rp.s_st;
    const double need_tail =
        (std::abs(1.0 - tau * g.beta_tail_n) + tau * std::abs(g.beta_tail_hv[1]) +
         tau * std::abs(g.beta_tail_head)) *
        rp.v_max / rp.s_st;
    g.alpha_head = need_head + slack(rng);
    g.alpha_tail = need_tail + slack(rng);

    if (head_checked < 200) {
      PlatoonState b = x;
      b.s_head = tau * b.v_head;
      if (b.s_head >= rp.s_st && b.s_head <= rp.s_go) {
        if (!head_gains_certified_safe(g, tau, rp)) ++violations;
        const double h_dot = v_d - b.v_head - tau * nominal_head(b, v_d, g, rp, cfg);
        if (h_dot < -1e-9) ++violations;
        ++head_checked;
      }
    }
    if (tail_checked < 200) {
      PlatoonState b = x;
      b.s_tail = tau * b.v_tail;
      if (b.s_tail >= rp.s_st && b.s_tail <= rp.s_go) {
        if (!tail_gains_certified_safe(g, tau, rp)) ++violations;
        const double h_dot = b.v(4) - b.v_tail - tau * nominal_tail(b, g, rp, cfg);
        if (h_dot < -1e-9) ++violations;
        ++tail_checked;
      }
    }
  }
  std::ostringstream os;
  os << violations << " counterexamples over 200 head + 200 tail boundary states";
  c.detail = os.str();
  c.pass = violations == 0;
  return c;
}

Criterion criterion_8_robustness() {
  Criterion c{"8 robust filter preserves HV safety under a mismatched driver model"};
  const ExperimentSpec plain = load_experiment_file("configs/fig6_nonrobust.json");
  const ExperimentSpec robust = load_experiment_file("configs/fig6_robust.json");
  const Metrics m_plain = run_experiment(plain.params, plain.scenario, plain.mode).second;
  const Metrics m_robust = run_experiment(robust.params, robust.scenario, robust.mode).second;

  std::ostringstream os;
  os << "min h_1 plain " << m_plain.min_h.at("hv_1") << " (< 0 required), robust "
     << m_robust.min_h.at("hv_1") << " (>= -1e-3 required)";
  c.detail = os.str();
  c.pass = m_plain.min_h.at("hv_1") < 0.0 && m_robust.min_h.at("hv_1") >= -1e-3;
  return c;
}

Criterion criterion_9_penetration_sweep() {
  Criterion c{"9 penetration sweep"};
  const ExperimentParams par = baseline_params();
  const Scenario sc = braking_scenario();
  const auto t0 = std::chrono::steady_clock::now();
  const auto entries = sweep_hv_count({1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                                      {ControllerMode::Nominal, ControllerMode::CbfCav}, sc, par,
                                      4);
  const double sweep_time = seconds_since(t0);

  bool all_below_one = true;
  std::map<std::string, std::pair<int, double>> argmin; // mode -> (N, I)
  for (const auto& e : entries) {
    all_below_one = all_below_one && e.metrics.I && *e.metrics.I < 1.0;
    const std::string key = to_string(e.mode);
    if (!argmin.count(key) || *e.metrics.I < argmin[key].second)
      argmin[key] = {e.n_hv, *e.metrics.I};
  }
  bool argmin_ok = true;
  std::ostringstream os;
  os << "I < 1 for all N: " << (all_below_one ? "yes" : "no");
  for (const auto& [mode, best] : argmin) {
    os << ", argmin_" << mode << " = " << best.first;
    argmin_ok = argmin_ok && best.first >= 3 && best.first <= 5;
  }
  os << ", sweep in " << sweep_time << " s";
  c.detail = os.str();
  c.pass = all_below_one && argmin_ok && sweep_time < 180.0;
  return c;
}

Criterion criterion_10_disjointness() {
  Criterion c{"10 certified-safe and string-stable regions do not meet"};
  PlatoonConfig cfg;
  cfg.n_hv = 4;
  const std::vector<HvParams> hv(4, HvParams{});
  const RangePolicy rp;
  const SafetyHeadways tau;

  CavGains safe_base; // widest certified box
  safe_base.alpha_head = 1.0;
  safe_base.alpha_tail = 1.0;
  safe_base.beta_head_d = 1.25;
  safe_base.beta_tail_n = 1.25;

  CavGains stab_base; // nominal ACC setup of the base stability chart
  stab_base.beta_head_tail = 0.0;
  stab_base.beta_tail_head = 0.0;

  const AxisSpec gx{-1.0, 2.0, 61};
  const AxisSpec gy{-1.0, 3.0, 61};
  const StabilityChart stab = stability_chart(gx, gy, stab_base, cfg, hv, rp, 20.0, 4);
  const SafetyChart safe = safety_chart({GainAxis::BetaHeadTail, gx.lo, gx.hi, gx.count},
                                        {GainAxis::BetaTailHead, gy.lo, gy.hi, gy.count},
                                        safe_base, tau, rp);
  int overlap = 0, safe_cells = 0, stable_cells = 0;
  for (int iy = 0; iy < gy.count; ++iy)
    for (int ix = 0; ix < gx.count; ++ix) {
      const bool cell_safe = safe.at(ix, iy).head_safe && safe.at(ix, iy).tail_safe;
      safe_cells += cell_safe;
      stable_cells += stab.at(ix, iy).string_stable;
      overlap += cell_safe && stab.at(ix, iy).string_stable;
    }
  std::ostringstream os;
  os << safe_cells << " certified cells, " << stable_cells << " string-stable cells, overlap "
     << overlap;
  c.detail = os.str();
  c.pass = overlap == 0 && safe_cells > 0 && stable_cells > 0;
  return c;
}

} // namespace

int main() {
  const std::vector<Criterion> results = {
      criterion_1_index_reproduction(),  criterion_2_platoon_safety_effect(),
      criterion_3_safety_enforcement(),  criterion_4_stability_chart(),
      criterion_5_analytic_oracles(),    criterion_6_qp_correctness(),
      criterion_7_certificates(),        criterion_8_robustness(),
      criterion_9_penetration_sweep(),   criterion_10_disjointness(),
  };
  bool all_pass = true;
  for (const auto& c : results) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.name << "\n      " << c.detail
              << "\n";
    all_pass = all_pass && c.pass;
  }
  std::cout << (all_pass ? "acceptance: all criteria satisfied\n"
                         : "acceptance: FAILURES detected\n");
  return all_pass ? 0 : 1;
}
