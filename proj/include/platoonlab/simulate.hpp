#pragma once

#include <platoonlab/cbf.hpp>
#include <platoonlab/parallel.hpp>
#include <platoonlab/platoon.hpp>
#include <platoonlab/safety.hpp>
#include <platoonlab/stability.hpp>

#include <json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

// Scenario definitions, fixed-step integration of the saturated closed loop
// under a chosen controller mode, trajectory recording, string-stability and
// safety metrics, and the gain / penetration / driver-parameter sweeps.

namespace platoonlab {

enum class ControllerMode {
  Nominal,        // the raw cooperative controllers
  CbfCav,         // min-form filters on both CAVs
  CbfCavHv,       // head-CAV QP with soft HV rows + tail min filter
  CbfFull,        // joint two-CAV QP with the platoon row
  RobustCbfCavHv, // CbfCavHv with the robust HV margin
};

inline std::string to_string(ControllerMode m) {
  switch (m) {
    case ControllerMode::Nominal: return "nominal";
    case ControllerMode::CbfCav: return "cbf_cav";
    case ControllerMode::CbfCavHv: return "cbf_cav_hv";
    case ControllerMode::CbfFull: return "cbf_full";
    case ControllerMode::RobustCbfCavHv: return "robust_cbf_cav_hv";
  }
  return "";
}

struct Scenario {
  enum class Kind { HeadHvDecel, MiddleHvDecel, MiddleHvAccel };
  Kind kind = Kind::HeadHvDecel;
  int hv_index = 1;     // target of the middle-HV kinds
  double accel = 5.0;   // forcing magnitude [m/s^2], positive
  double delta_v = 20.0;
  double t_start = 2.0;
  double horizon = 50.0;
  double dt = 0.01;
  double v_star = 20.0;

  double forcing_end() const { return t_start + delta_v / accel; }

  void validate(int n_hv) const {
    if (accel <= 0) throw std::invalid_argument("scenario: accel must be positive");
    if (delta_v < 0) throw std::invalid_argument("scenario: delta_v must be nonnegative");
    if (t_start < 0) throw std::invalid_argument("scenario: t_start must be nonnegative");
    if (forcing_end() > horizon) throw std::invalid_argument("scenario: forcing extends past the horizon");
    if (dt <= 0 || horizon <= 0) throw std::invalid_argument("scenario: dt and horizon must be positive");
    if (kind != Kind::HeadHvDecel && delta_v > 0 && (hv_index < 1 || hv_index > n_hv))
      throw std::invalid_argument("scenario: hv_index out of range");
    if (kind != Kind::MiddleHvAccel && delta_v > v_star)
      throw std::invalid_argument("scenario: deceleration exceeds the equilibrium speed");
  }
};

/// Leader speed v_d(t): a symmetric slow-down-and-recover ramp for the
/// head-disturbance scenario, constant v_star otherwise.
inline double leader_speed(const Scenario& sc, double t) {
  if (sc.kind != Scenario::Kind::HeadHvDecel) return sc.v_star;
  const double t1 = sc.t_start + sc.delta_v / sc.accel;
  const double t2 = sc.t_start + 2.0 * sc.delta_v / sc.accel;
  if (t <= sc.t_start) return sc.v_star;
  if (t <= t1) return sc.v_star - sc.accel * (t - sc.t_start);
  if (t <= t2) return sc.v_star - sc.delta_v + sc.accel * (t - t1);
  return sc.v_star;
}

/// Forced-acceleration override of one middle HV while the scenario drives
/// it; deceleration is cut off at standstill (the clamp is reported so runs
/// that hit it are identifiable).
inline std::optional<AccelOverride> scenario_override(const Scenario& sc, double t,
                                                      const PlatoonState& x,
                                                      bool* clamped = nullptr) {
  if (sc.kind == Scenario::Kind::HeadHvDecel || sc.delta_v <= 0.0) return std::nullopt;
  if (t < sc.t_start || t >= sc.forcing_end()) return std::nullopt;
  double a = sc.kind == Scenario::Kind::MiddleHvDecel ? -sc.accel : sc.accel;
  if (a < 0.0 && x.v(sc.hv_index) <= 0.0) {
    a = 0.0;
    if (clamped) *clamped = true;
  }
  return AccelOverride{AccelOverride::Vehicle::Hv, sc.hv_index, a};
}

/// Everything a run needs besides the scenario: the platoon, the plant and
/// design-side HV models, gains, and filter parameters.
struct ExperimentParams {
  PlatoonConfig cfg;
  std::vector<HvParams> hv;        // plant drivers
  std::vector<HvParams> design_hv; // model inside the CBF bounds; empty = plant
  RangePolicy rp;
  CavGains gains;
  SafetyHeadways headways;
  CbfParams cbf;
  ActuationLimits limits;
  Disturbance disturbance;

  const std::vector<HvParams>& design_models() const {
    return design_hv.empty() ? hv : design_hv;
  }

  void validate() const {
    cfg.validate();
    if (static_cast<int>(hv.size()) != cfg.n_hv)
      throw std::invalid_argument("params: one HvParams per HV required");
    if (!design_hv.empty() && design_hv.size() != hv.size())
      throw std::invalid_argument("params: design_hv size mismatch");
    for (int i : cfg.head_connected)
      if (!cbf.hv.count(i))
        throw std::invalid_argument("params: missing CBF parameters for connected HV");
  }
};

struct StepRecord {
  double t = 0;
  double v_d = 0;
  PlatoonState state;
  double u_head_filter = 0, u_tail_filter = 0;   // controller outputs before saturation
  double u_head_applied = 0, u_tail_applied = 0; // after saturation
  SafetyReadout safety;
  std::map<int, double> slacks;
};

struct TrajectoryRecord {
  std::vector<StepRecord> steps;
  int forced_profile_clamps = 0; // standstill clamps of a forced deceleration
  double min_speed = 0;          // diagnostic: negative speeds flag odd regimes
  // HV barriers that start negative are reported, not rejected: the filter
  // then steers toward the safe set instead of rendering it invariant
  std::vector<int> initial_hv_barrier_violations;

  double dt() const { return steps.size() > 1 ? steps[1].t - steps[0].t : 0.0; }
};

namespace detail {

struct FilterOutput {
  double u_head = 0, u_tail = 0;
  std::map<int, double> slacks;
};

inline FilterOutput evaluate_controller(const PlatoonState& x, double v_d, ControllerMode mode,
                                        const ExperimentParams& par) {
  FilterOutput out;
  const double k_nh = nominal_head(x, v_d, par.gains, par.rp, par.cfg);
  const double k_nt = nominal_tail(x, par.gains, par.rp, par.cfg);
  switch (mode) {
    case ControllerMode::Nominal:
      out.u_head = k_nh;
      out.u_tail = k_nt;
      break;
    case ControllerMode::CbfCav:
      out.u_head = filter_head_min(k_nh, ub_head(x, v_d, par.headways.tau_head, par.cbf.gamma_head));
      out.u_tail = filter_tail_min(k_nt, ub_tail(x, par.headways.tau_tail, par.cbf.gamma_tail));
      break;
    case ControllerMode::CbfCavHv:
    case ControllerMode::RobustCbfCavHv: {
      const bool robust = mode == ControllerMode::RobustCbfCavHv;
      const HeadQpResult head = qp_head(x, v_d, k_nh, par.design_models(), par.cbf, par.headways,
                                        par.cfg.head_connected, robust);
      out.u_head = head.u_head;
      out.slacks = head.slacks;
      out.u_tail = filter_tail_min(k_nt, ub_tail(x, par.headways.tau_tail, par.cbf.gamma_tail));
      break;
    }
    case ControllerMode::CbfFull: {
      const FilterDecision dec = qp_joint(x, v_d, k_nh, k_nt, par.design_models(), par.cbf,
                                          par.headways, par.cfg, par.cfg.head_connected);
      out.u_head = dec.u_head;
      out.u_tail = dec.u_tail;
      out.slacks = dec.slacks;
      break;
    }
  }
  return out;
}

} // namespace detail

/// Classical fixed-step fourth-order integration with zero-order-hold
/// control: the controller and filters are evaluated once per step at the
/// step start; the plant (HV models, leader speed, forced profiles) is
/// evaluated at the stage times. Saturation applies inside the derivative.
inline TrajectoryRecord integrate(const PlatoonState& initial, const Scenario& sc,
                                  ControllerMode mode, const ExperimentParams& par) {
  par.validate();
  sc.validate(par.cfg.n_hv);
  const int n_steps = static_cast<int>(std::llround(sc.horizon / sc.dt));
  const int n = par.cfg.n_hv;

  std::map<int, double> eta_by_hv;
  for (const auto& [i, p] : par.cbf.hv) eta_by_hv[i] = p.eta;

  TrajectoryRecord rec;
  rec.steps.reserve(static_cast<std::size_t>(n_steps) + 1);
  rec.min_speed = std::numeric_limits<double>::infinity();
  for (int i : par.cfg.head_connected) {
    const auto& p = par.cbf.hv.at(i);
    if (h_bar_hv(initial, i, p.tau, p.eta, par.headways.tau_head) < 0.0)
      rec.initial_hv_barrier_violations.push_back(i);
  }

  Eigen::VectorXd x = initial.to_vector();
  for (int k = 0; k <= n_steps; ++k) {
    const double t = k * sc.dt;
    const PlatoonState st = PlatoonState::from_vector(x, n);
    const double v_d = leader_speed(sc, t);
    const detail::FilterOutput u = detail::evaluate_controller(st, v_d, mode, par);

    StepRecord step;
    step.t = t;
    step.v_d = v_d;
    step.state = st;
    step.u_head_filter = u.u_head;
    step.u_tail_filter = u.u_tail;
    step.u_head_applied = saturate(u.u_head, par.limits);
    step.u_tail_applied = saturate(u.u_tail, par.limits);
    step.safety = safety_readout(st, par.cfg, par.headways, eta_by_hv);
    step.slacks = u.slacks;
    rec.steps.push_back(std::move(step));

    rec.min_speed = std::min({rec.min_speed, st.v_head, st.v_tail});
    for (double v : st.v_hv) rec.min_speed = std::min(rec.min_speed, v);

    if (k == n_steps) break;

    auto f = [&](const Eigen::VectorXd& xv, double stage_t) {
      const PlatoonState sx = PlatoonState::from_vector(xv, n);
      bool clamped = false;
      const auto ovr = scenario_override(sc, stage_t, sx, &clamped);
      if (clamped) ++rec.forced_profile_clamps;
      return closed_loop_rhs(sx, leader_speed(sc, stage_t), u.u_head, u.u_tail, par.hv,
                             par.disturbance, par.limits, ovr);
    };
    const Eigen::VectorXd k1 = f(x, t);
    const Eigen::VectorXd k2 = f(x + 0.5 * sc.dt * k1, t + 0.5 * sc.dt);
    const Eigen::VectorXd k3 = f(x + 0.5 * sc.dt * k2, t + 0.5 * sc.dt);
    const Eigen::VectorXd k4 = f(x + sc.dt * k3, t + sc.dt);
    x += sc.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!x.allFinite()) {
      std::ostringstream os;
      os << "integrate: non-finite state at t = " << (t + sc.dt) << " (mode " << to_string(mode)
         << ")";
      throw std::runtime_error(os.str());
    }
  }
  return rec;
}

/// L2 ratio of tail-CAV to leader speed perturbations, trapezoidal on the
/// record grid. Undefined when the leader never deviates.
inline double metric_I(const TrajectoryRecord& rec, double v_star) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k + 1 < rec.steps.size(); ++k) {
    const double dt = rec.steps[k + 1].t - rec.steps[k].t;
    auto sq = [&](double v) { return (v - v_star) * (v - v_star); };
    num += 0.5 * dt * (sq(rec.steps[k].state.v_tail) + sq(rec.steps[k + 1].state.v_tail));
    den += 0.5 * dt * (sq(rec.steps[k].v_d) + sq(rec.steps[k + 1].v_d));
  }
  if (den <= 0.0)
    throw std::domain_error("metric_I: index not applicable, leader speed is unperturbed");
  return std::sqrt(num) / std::sqrt(den);
}

/// Mean of the per-vehicle L2 ratios over the head CAV, every HV, and the
/// tail CAV.
inline double metric_I_bar(const TrajectoryRecord& rec, double v_star) {
  if (rec.steps.empty()) throw std::domain_error("metric_I_bar: empty record");
  const int n = rec.steps.front().state.n_hv();
  std::vector<double> num(static_cast<std::size_t>(n) + 2, 0.0);
  double den = 0;
  auto sq = [&](double v) { return (v - v_star) * (v - v_star); };
  for (std::size_t k = 0; k + 1 < rec.steps.size(); ++k) {
    const double dt = rec.steps[k + 1].t - rec.steps[k].t;
    const auto& a = rec.steps[k].state;
    const auto& b = rec.steps[k + 1].state;
    num[0] += 0.5 * dt * (sq(a.v_head) + sq(b.v_head));
    for (int i = 1; i <= n; ++i)
      num[static_cast<std::size_t>(i)] += 0.5 * dt * (sq(a.v(i)) + sq(b.v(i)));
    num[static_cast<std::size_t>(n) + 1] += 0.5 * dt * (sq(a.v_tail) + sq(b.v_tail));
    den += 0.5 * dt * (sq(rec.steps[k].v_d) + sq(rec.steps[k + 1].v_d));
  }
  if (den <= 0.0)
    throw std::domain_error("metric_I_bar: index not applicable, leader speed is unperturbed");
  double acc = 0;
  for (double v : num) acc += std::sqrt(v) / std::sqrt(den);
  return acc / static_cast<double>(n + 2);
}

struct Metrics {
  std::optional<double> I;
  std::optional<double> I_bar;
  std::map<std::string, double> min_h; // head, tail, platoon, hv_1..hv_N
  double min_gap = 0;
  bool collision = false;
  double min_u_head_applied = 0, min_u_tail_applied = 0;
};

inline Metrics compute_metrics(const TrajectoryRecord& rec, double v_star) {
  Metrics m;
  if (rec.steps.empty()) return m;
  const int n = rec.steps.front().state.n_hv();
  m.min_gap = std::numeric_limits<double>::infinity();
  m.min_u_head_applied = std::numeric_limits<double>::infinity();
  m.min_u_tail_applied = std::numeric_limits<double>::infinity();
  m.min_h["head"] = std::numeric_limits<double>::infinity();
  m.min_h["tail"] = std::numeric_limits<double>::infinity();
  m.min_h["platoon"] = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i)
    m.min_h["hv_" + std::to_string(i)] = std::numeric_limits<double>::infinity();

  for (const auto& s : rec.steps) {
    m.min_h["head"] = std::min(m.min_h["head"], s.safety.h_head);
    m.min_h["tail"] = std::min(m.min_h["tail"], s.safety.h_tail);
    m.min_h["platoon"] = std::min(m.min_h["platoon"], s.safety.h_platoon);
    for (int i = 1; i <= n; ++i) {
      auto& slot = m.min_h["hv_" + std::to_string(i)];
      slot = std::min(slot, s.safety.h_hv[static_cast<std::size_t>(i - 1)]);
    }
    m.min_gap = std::min({m.min_gap, s.state.s_head, s.state.s_tail});
    for (double g : s.state.s_hv) m.min_gap = std::min(m.min_gap, g);
    m.min_u_head_applied = std::min(m.min_u_head_applied, s.u_head_applied);
    m.min_u_tail_applied = std::min(m.min_u_tail_applied, s.u_tail_applied);
  }
  m.collision = m.min_gap <= 0.0;
  try {
    m.I = metric_I(rec, v_star);
    m.I_bar = metric_I_bar(rec, v_star);
  } catch (const std::domain_error&) {
    // leader unperturbed (middle-HV scenarios): indices stay unset
  }
  return m;
}

/// Deterministic end-to-end run from the platoon equilibrium.
inline std::pair<TrajectoryRecord, Metrics> run_experiment(const ExperimentParams& par,
                                                           const Scenario& sc,
                                                           ControllerMode mode) {
  const PlatoonState x0 = assemble_equilibrium(par.cfg, par.hv, par.rp, sc.v_star);
  TrajectoryRecord rec = integrate(x0, sc, mode, par);
  Metrics m = compute_metrics(rec, sc.v_star);
  return {std::move(rec), m};
}

// --- sweeps ---------------------------------------------------------------

struct GainSweepCell {
  double beta_head_tail = 0, beta_tail_head = 0;
  Metrics metrics;      // at the scenario's delta_v
  double max_safe_dv = 0; // largest delta_v (1 m/s grid) with both CAVs safe
  bool monotone = true;   // false when safety was non-monotone at the boundary
};

struct GainSweepResult {
  AxisSpec beta_head_tail, beta_tail_head;
  std::vector<GainSweepCell> cells; // row-major, beta_tail_head outer
};

/// "Safe" in sweeps tolerates -1e-3 m of discretization slack on the CAV
/// safety functions.
inline bool cavs_safe(const Metrics& m, double tol = 1e-3) {
  return m.min_h.at("head") >= -tol && m.min_h.at("tail") >= -tol;
}

inline GainSweepResult sweep_gains(const AxisSpec& x_axis, const AxisSpec& y_axis,
                                   const Scenario& sc, ControllerMode mode,
                                   const ExperimentParams& base, bool bisect_dv = true,
                                   int workers = 1) {
  GainSweepResult result;
  result.beta_head_tail = x_axis;
  result.beta_tail_head = y_axis;
  result.cells.resize(static_cast<std::size_t>(x_axis.count) * static_cast<std::size_t>(y_axis.count));

  parallel_for(static_cast<int>(result.cells.size()), workers, [&](int idx) {
    const int ix = idx % x_axis.count;
    const int iy = idx / x_axis.count;
    ExperimentParams par = base;
    par.gains.beta_head_tail = x_axis.value(ix);
    par.gains.beta_tail_head = y_axis.value(iy);

    GainSweepCell cell;
    cell.beta_head_tail = par.gains.beta_head_tail;
    cell.beta_tail_head = par.gains.beta_tail_head;
    cell.metrics = run_experiment(par, sc, mode).second;

    if (bisect_dv) {
      auto safe_at = [&](double dv) {
        Scenario probe = sc;
        probe.delta_v = dv;
        return cavs_safe(run_experiment(par, probe, mode).second);
      };
      // integer-resolution bisection; risk is monotone in delta_v in
      // practice, and the boundary pair is re-verified afterwards
      int lo = 0, hi = static_cast<int>(std::floor(sc.v_star));
      if (safe_at(hi)) {
        cell.max_safe_dv = hi;
      } else {
        while (hi - lo > 1) {
          const int mid = (lo + hi) / 2;
          (safe_at(mid) ? lo : hi) = mid;
        }
        cell.max_safe_dv = lo;
        if (lo >= 1 && !safe_at(lo)) cell.monotone = false;
      }
    }
    result.cells[static_cast<std::size_t>(idx)] = cell;
  });
  return result;
}

struct HvCountSweepEntry {
  int n_hv = 0;
  ControllerMode mode = ControllerMode::Nominal;
  Metrics metrics;
};

/// Repeats a scenario for a range of platoon sizes; the CAV gains are held
/// fixed (non-connected middle HVs are never fed back).
inline std::vector<HvCountSweepEntry> sweep_hv_count(const std::vector<int>& n_values,
                                                     const std::vector<ControllerMode>& modes,
                                                     const Scenario& sc,
                                                     const ExperimentParams& base,
                                                     int workers = 1) {
  std::vector<std::pair<int, ControllerMode>> jobs;
  for (int n : n_values)
    for (ControllerMode m : modes) jobs.emplace_back(n, m);
  std::vector<HvCountSweepEntry> out(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), workers, [&](int idx) {
    const auto [n, mode] = jobs[static_cast<std::size_t>(idx)];
    ExperimentParams par = base;
    par.cfg.n_hv = n;
    par.cfg.head_connected.clear();
    par.cfg.tail_connected.clear();
    par.cfg.hv_lengths.clear();
    par.hv.assign(static_cast<std::size_t>(n), base.hv.front());
    par.design_hv.clear();
    par.gains.beta_head_hv.clear();
    par.gains.beta_tail_hv.clear();
    par.headways.tau_hv.assign(static_cast<std::size_t>(n), base.headways.tau(1));
    par.disturbance = {};
    out[static_cast<std::size_t>(idx)] = {n, mode, run_experiment(par, sc, mode).second};
  });
  return out;
}

enum class HvParameter { A, B, SSt, SGo };

inline std::string to_string(HvParameter p) {
  switch (p) {
    case HvParameter::A: return "a";
    case HvParameter::B: return "b";
    case HvParameter::SSt: return "s_st";
    case HvParameter::SGo: return "s_go";
  }
  return "";
}

struct HvParamSweepResult {
  std::vector<double> values;
  std::vector<StabilityChart> charts; // one per value
  StabilityChart overlap;             // cell-wise AND over the family
};

/// Stability charts for a family of driver parameter values, plus the
/// overlap of their string-stable regions.
inline HvParamSweepResult sweep_hv_params(HvParameter which, const std::vector<double>& values,
                                          const AxisSpec& x_axis, const AxisSpec& y_axis,
                                          const CavGains& base_gains, const PlatoonConfig& cfg,
                                          const HvParams& base_hv, const RangePolicy& rp,
                                          double v_star, int workers = 1) {
  if (values.empty()) throw std::invalid_argument("sweep_hv_params: no values");
  HvParamSweepResult result;
  result.values = values;
  for (double v : values) {
    HvParams p = base_hv;
    switch (which) {
      case HvParameter::A: p.a = v; break;
      case HvParameter::B: p.b = v; break;
      case HvParameter::SSt: p.s_st = v; break;
      case HvParameter::SGo: p.s_go = v; break;
    }
    const std::vector<HvParams> fleet(static_cast<std::size_t>(cfg.n_hv), p);
    result.charts.push_back(
        stability_chart(x_axis, y_axis, base_gains, cfg, fleet, rp, v_star, workers));
  }
  result.overlap = result.charts.front();
  for (std::size_t c = 1; c < result.charts.size(); ++c)
    for (std::size_t k = 0; k < result.overlap.cells.size(); ++k) {
      result.overlap.cells[k].plant_stable =
          result.overlap.cells[k].plant_stable && result.charts[c].cells[k].plant_stable;
      result.overlap.cells[k].string_stable =
          result.overlap.cells[k].string_stable && result.charts[c].cells[k].string_stable;
    }
  return result;
}

// --- output ----------------------------------------------------------------

/// Fixed column set: t, v_d, gaps/speeds in platoon order, applied inputs,
/// safety functions, HV slacks.
inline void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& os) {
  if (rec.steps.empty()) return;
  const int n = rec.steps.front().state.n_hv();
  os << "t,v_d,s_H,v_H";
  for (int i = 1; i <= n; ++i) os << ",s_" << i << ",v_" << i;
  os << ",s_T,v_T,u_H_applied,u_T_applied,h_H,h_T";
  for (int i = 1; i <= n; ++i) os << ",h_" << i;
  os << ",h_p";
  for (int i = 1; i <= n; ++i) os << ",sigma_" << i;
  os << '\n';
  for (const auto& s : rec.steps) {
    os << s.t << ',' << s.v_d << ',' << s.state.s_head << ',' << s.state.v_head;
    for (int i = 1; i <= n; ++i) os << ',' << s.state.s(i) << ',' << s.state.v(i);
    os << ',' << s.state.s_tail << ',' << s.state.v_tail << ',' << s.u_head_applied << ','
       << s.u_tail_applied << ',' << s.safety.h_head << ',' << s.safety.h_tail;
    for (int i = 1; i <= n; ++i) os << ',' << s.safety.h_hv[static_cast<std::size_t>(i - 1)];
    os << ',' << s.safety.h_platoon;
    for (int i = 1; i <= n; ++i)
      os << ',' << (s.slacks.count(i) ? s.slacks.at(i) : 0.0);
    os << '\n';
  }
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["I"] = m.I ? nlohmann::json(*m.I) : nlohmann::json();
  j["I_bar"] = m.I_bar ? nlohmann::json(*m.I_bar) : nlohmann::json();
  j["min_h"] = m.min_h;
  j["min_gap"] = m.min_gap;
  j["collision"] = m.collision;
  j["min_u_head_applied"] = m.min_u_head_applied;
  j["min_u_tail_applied"] = m.min_u_tail_applied;
  return j;
}

inline void write_metrics_json(const Metrics& m, std::ostream& os) {
  os << metrics_to_json(m).dump(2) << '\n';
}

inline void write_gain_sweep_csv(const GainSweepResult& r, std::ostream& os) {
  os << "beta_head_tail,beta_tail_head,I,min_h_head,min_h_tail,min_gap,collision,max_safe_dv,"
        "monotone\n";
  for (const auto& c : r.cells) {
    os << c.beta_head_tail << ',' << c.beta_tail_head << ','
       << (c.metrics.I ? std::to_string(*c.metrics.I) : std::string("nan")) << ','
       << c.metrics.min_h.at("head") << ',' << c.metrics.min_h.at("tail") << ','
       << c.metrics.min_gap << ',' << (c.metrics.collision ? 1 : 0) << ',' << c.max_safe_dv
       << ',' << (c.monotone ? 1 : 0) << '\n';
  }
}

inline void write_hv_count_sweep_csv(const std::vector<HvCountSweepEntry>& entries,
                                     std::ostream& os) {
  os << "n_hv,mode,I,min_h_head,min_h_tail,min_gap,collision\n";
  for (const auto& e : entries) {
    os << e.n_hv << ',' << to_string(e.mode) << ','
       << (e.metrics.I ? std::to_string(*e.metrics.I) : std::string("nan")) << ','
       << e.metrics.min_h.at("head") << ',' << e.metrics.min_h.at("tail") << ','
       << e.metrics.min_gap << ',' << (e.metrics.collision ? 1 : 0) << '\n';
  }
}

} // namespace platoonlab
