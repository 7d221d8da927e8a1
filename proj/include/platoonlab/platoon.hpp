#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

// Vehicle models and closed-loop dynamics of a mixed platoon: a head CAV,
// N human-driven vehicles, and a tail CAV. State ordering throughout is
// [s_H, v_H, s_1, v_1, ..., s_N, v_N, s_T, v_T].

namespace platoonlab {

/// Piecewise-linear map from gap to desired speed: zero below the standstill
/// gap, v_max above the free-driving gap, linear in between.
struct RangePolicy {
  double s_st = 2.0;
  double s_go = 40.0;
  double v_max = 40.0;

  double kappa() const { return v_max / (s_go - s_st); }
};

/// Optimal-velocity driver parameters. The desired-speed curve shares the
/// RangePolicy shape but with driver-specific gaps.
struct HvParams {
  double a = 0.4;     // gain on desired-speed mismatch [1/s]
  double b = 0.6;     // gain on closing speed [1/s]
  double s_st = 1.9;  // standstill gap [m]
  double s_go = 46.3; // free-driving gap [m]
  double v_max = 40.0;

  RangePolicy range_policy() const { return {s_st, s_go, v_max}; }
};

struct PlatoonConfig {
  int n_hv = 4;
  std::set<int> head_connected; // HV indices fed back to the head CAV, subset of {1..N}
  std::set<int> tail_connected; // HV indices fed back to the tail CAV, subset of {1..N-1}
  std::vector<double> hv_lengths;      // empty means 5 m each
  double tail_cav_length = 5.0;
  double platoon_base_length = 100.0;

  int state_dim() const { return 2 * n_hv + 4; }

  double hv_length(int i) const {
    return hv_lengths.empty() ? 5.0 : hv_lengths.at(static_cast<std::size_t>(i - 1));
  }

  void validate() const {
    if (n_hv < 1) throw std::invalid_argument("platoon: n_hv must be >= 1");
    for (int i : head_connected)
      if (i < 1 || i > n_hv) throw std::invalid_argument("platoon: head_connected index out of range");
    // HV-N precedes the tail CAV and is sensed directly, so it is never a
    // V2V feedback target of the tail controller.
    for (int i : tail_connected)
      if (i < 1 || i > n_hv - 1) throw std::invalid_argument("platoon: tail_connected index out of range");
    if (!hv_lengths.empty() && static_cast<int>(hv_lengths.size()) != n_hv)
      throw std::invalid_argument("platoon: hv_lengths size mismatch");
    for (double l : hv_lengths)
      if (l <= 0) throw std::invalid_argument("platoon: vehicle lengths must be positive");
    if (tail_cav_length <= 0 || platoon_base_length <= 0)
      throw std::invalid_argument("platoon: lengths must be positive");
  }
};

struct PlatoonState {
  double s_head = 0, v_head = 0;
  std::vector<double> s_hv, v_hv;
  double s_tail = 0, v_tail = 0;

  int n_hv() const { return static_cast<int>(s_hv.size()); }

  double s(int i) const { return s_hv.at(static_cast<std::size_t>(i - 1)); }
  double v(int i) const { return v_hv.at(static_cast<std::size_t>(i - 1)); }

  /// Speed of the vehicle ahead of HV-i; HV-1 follows the head CAV.
  double v_pred(int i) const { return i == 1 ? v_head : v(i - 1); }

  Eigen::VectorXd to_vector() const {
    const int n = n_hv();
    Eigen::VectorXd x(2 * n + 4);
    x(0) = s_head;
    x(1) = v_head;
    for (int i = 0; i < n; ++i) {
      x(2 + 2 * i) = s_hv[static_cast<std::size_t>(i)];
      x(3 + 2 * i) = v_hv[static_cast<std::size_t>(i)];
    }
    x(2 * n + 2) = s_tail;
    x(2 * n + 3) = v_tail;
    return x;
  }

  static PlatoonState from_vector(const Eigen::VectorXd& x, int n_hv) {
    if (x.size() != 2 * n_hv + 4)
      throw std::invalid_argument("platoon state vector must have 2N+4 entries");
    PlatoonState st;
    st.s_head = x(0);
    st.v_head = x(1);
    st.s_hv.resize(static_cast<std::size_t>(n_hv));
    st.v_hv.resize(static_cast<std::size_t>(n_hv));
    for (int i = 0; i < n_hv; ++i) {
      st.s_hv[static_cast<std::size_t>(i)] = x(2 + 2 * i);
      st.v_hv[static_cast<std::size_t>(i)] = x(3 + 2 * i);
    }
    st.s_tail = x(2 * n_hv + 2);
    st.v_tail = x(2 * n_hv + 3);
    return st;
  }
};

/// Feedback gains of the two cooperative CAV controllers. Per-HV maps must
/// be keyed exactly by the connected sets of the PlatoonConfig in use.
struct CavGains {
  double alpha_head = 0.4;
  double beta_head_d = 0.6;
  std::map<int, double> beta_head_hv;
  double beta_head_tail = 0.0;

  double alpha_tail = 0.4;
  double beta_tail_n = 0.6;
  std::map<int, double> beta_tail_hv;
  double beta_tail_head = 0.0;
};

struct ActuationLimits {
  double u_min = -7.0;
  double u_max = 7.0;
};

/// Additive unmodeled-dynamics term on each HV acceleration; empty means zero.
struct Disturbance {
  std::vector<double> d;

  double at(int i) const {
    return d.empty() ? 0.0 : d.at(static_cast<std::size_t>(i - 1));
  }
};

inline double saturate(double u, const ActuationLimits& lim) {
  if (u < lim.u_min) return lim.u_min;
  if (u > lim.u_max) return lim.u_max;
  return u;
}

/// W(v): speeds above v_max carry no feedback benefit, so they are capped.
inline double speed_cap(double v, double v_max) { return v < v_max ? v : v_max; }

inline double range_policy_speed(const RangePolicy& rp, double s) {
  if (s <= rp.s_st) return 0.0;
  if (s >= rp.s_go) return rp.v_max;
  return rp.kappa() * (s - rp.s_st);
}

/// Optimal velocity model: a(V(s) - v) + b*s_dot.
inline double ovm_accel(const HvParams& p, double s, double v, double s_dot) {
  return p.a * (range_policy_speed(p.range_policy(), s) - v) + p.b * s_dot;
}

/// Nominal head-CAV controller: ACC on the leader plus feedback from
/// connected HVs and the tail CAV.
inline double nominal_head(const PlatoonState& x, double v_d, const CavGains& g,
                           const RangePolicy& rp, const PlatoonConfig& cfg) {
  double u = g.alpha_head * (range_policy_speed(rp, x.s_head) - x.v_head) +
             g.beta_head_d * (speed_cap(v_d, rp.v_max) - x.v_head);
  for (int i : cfg.head_connected)
    u += g.beta_head_hv.at(i) * (speed_cap(x.v(i), rp.v_max) - x.v_head);
  u += g.beta_head_tail * (speed_cap(x.v_tail, rp.v_max) - x.v_head);
  return u;
}

/// Nominal tail-CAV controller: ACC on HV-N plus feedback from connected
/// HVs and the head CAV.
inline double nominal_tail(const PlatoonState& x, const CavGains& g,
                           const RangePolicy& rp, const PlatoonConfig& cfg) {
  const int n = cfg.n_hv;
  double u = g.alpha_tail * (range_policy_speed(rp, x.s_tail) - x.v_tail) +
             g.beta_tail_n * (speed_cap(x.v(n), rp.v_max) - x.v_tail);
  for (int i : cfg.tail_connected)
    u += g.beta_tail_hv.at(i) * (speed_cap(x.v(i), rp.v_max) - x.v_tail);
  u += g.beta_tail_head * (speed_cap(x.v_head, rp.v_max) - x.v_tail);
  return u;
}

/// Gap at which the OVM driver holds v_star. Valid for 0 <= v_star < v_max;
/// above that the desired-speed curve has no interior inverse.
inline double hv_equilibrium_gap(const HvParams& p, double v_star) {
  if (v_star < 0.0 || v_star >= p.v_max)
    throw std::invalid_argument("hv_equilibrium_gap: v_star outside [0, v_max)");
  return p.s_st + v_star * (p.s_go - p.s_st) / p.v_max;
}

inline double cav_equilibrium_gap(const RangePolicy& rp, double v_star) {
  if (v_star < 0.0 || v_star >= rp.v_max)
    throw std::invalid_argument("cav_equilibrium_gap: v_star outside [0, v_max)");
  return rp.s_st + v_star * (rp.s_go - rp.s_st) / rp.v_max;
}

/// Uniform-speed equilibrium: every vehicle at v_star with the gap that
/// zeroes its acceleration. The closed-loop right-hand side vanishes here.
inline PlatoonState assemble_equilibrium(const PlatoonConfig& cfg,
                                         const std::vector<HvParams>& hv,
                                         const RangePolicy& rp, double v_star) {
  if (static_cast<int>(hv.size()) != cfg.n_hv)
    throw std::invalid_argument("assemble_equilibrium: one HvParams per HV required");
  PlatoonState x;
  x.s_head = cav_equilibrium_gap(rp, v_star);
  x.v_head = v_star;
  for (const HvParams& p : hv) {
    x.s_hv.push_back(hv_equilibrium_gap(p, v_star));
    x.v_hv.push_back(v_star);
  }
  x.s_tail = cav_equilibrium_gap(rp, v_star);
  x.v_tail = v_star;
  return x;
}

/// Replaces one vehicle's acceleration (model or controller output) with a
/// raw value for a single derivative evaluation.
struct AccelOverride {
  enum class Vehicle { Head, Hv, Tail };
  Vehicle vehicle = Vehicle::Hv;
  int hv_index = 1; // used when vehicle == Hv
  double accel = 0.0;
};

/// Closed-loop state derivative. Gap rates are speed differences; speed
/// rates are saturated accelerations (disturbance enters before saturation).
inline Eigen::VectorXd closed_loop_rhs(const PlatoonState& x, double v_d, double u_head,
                                       double u_tail, const std::vector<HvParams>& hv,
                                       const Disturbance& dist, const ActuationLimits& lim,
                                       const std::optional<AccelOverride>& ovr = {}) {
  const int n = x.n_hv();
  if (static_cast<int>(hv.size()) != n)
    throw std::invalid_argument("closed_loop_rhs: one HvParams per HV required");
  Eigen::VectorXd dx(2 * n + 4);

  auto overridden = [&](AccelOverride::Vehicle veh, int idx) -> std::optional<double> {
    if (ovr && ovr->vehicle == veh && (veh != AccelOverride::Vehicle::Hv || ovr->hv_index == idx))
      return ovr->accel;
    return std::nullopt;
  };

  dx(0) = v_d - x.v_head;
  dx(1) = saturate(overridden(AccelOverride::Vehicle::Head, 0).value_or(u_head), lim);
  for (int i = 1; i <= n; ++i) {
    const double s_dot = x.v_pred(i) - x.v(i);
    dx(2 * i) = s_dot;
    const double model = ovm_accel(hv[static_cast<std::size_t>(i - 1)], x.s(i), x.v(i), s_dot) + dist.at(i);
    dx(2 * i + 1) = saturate(overridden(AccelOverride::Vehicle::Hv, i).value_or(model), lim);
  }
  dx(2 * n + 2) = x.v(n) - x.v_tail;
  dx(2 * n + 3) = saturate(overridden(AccelOverride::Vehicle::Tail, 0).value_or(u_tail), lim);
  return dx;
}

} // namespace platoonlab
