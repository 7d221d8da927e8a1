#pragma once

#include <platoonlab/platoon.hpp>

#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

// Constant-time-headway safety surrogates h = s - tau*v for the CAVs, the
// middle HVs, and the whole platoon, plus the closed-form safe-gain
// certificates for the nominal controllers. h >= 0 reads "safe".

namespace platoonlab {

struct SafetyHeadways {
  double tau_head = 0.8;
  double tau_tail = 0.8;
  double tau_platoon = 1.0;
  std::vector<double> tau_hv; // empty means 1 s each

  double tau(int i) const {
    return tau_hv.empty() ? 1.0 : tau_hv.at(static_cast<std::size_t>(i - 1));
  }
};

inline double h_head(const PlatoonState& x, double tau_head) {
  return x.s_head - tau_head * x.v_head;
}

inline double h_tail(const PlatoonState& x, double tau_tail) {
  return x.s_tail - tau_tail * x.v_tail;
}

inline double h_hv(const PlatoonState& x, int i, double tau_i) {
  return x.s(i) - tau_i * x.v(i);
}

/// Relative-degree-one surrogate for HV-i: h_i discounted by the head CAV's
/// own margin, so the head CAV's input appears in its derivative.
inline double h_bar_hv(const PlatoonState& x, int i, double tau_i, double eta_i,
                       double tau_head) {
  return h_hv(x, i, tau_i) - eta_i * h_head(x, tau_head);
}

/// Bumper-to-bumper distance between the two CAVs.
inline double gap_between_cavs(const PlatoonState& x, const PlatoonConfig& cfg) {
  double total = x.s_tail + cfg.tail_cav_length;
  for (int i = 1; i <= cfg.n_hv; ++i) total += x.s(i) + cfg.hv_length(i);
  return total;
}

inline double h_platoon(const PlatoonState& x, const PlatoonConfig& cfg, double tau_p) {
  return gap_between_cavs(x, cfg) - cfg.platoon_base_length - tau_p * (x.v_tail - x.v_head);
}

/// Safety functions evaluated at one state; h_bar entries exist for the
/// head-connected HVs only.
struct SafetyReadout {
  double h_head = 0, h_tail = 0, h_platoon = 0;
  std::vector<double> h_hv;
  std::map<int, double> h_bar_hv;
};

inline SafetyReadout safety_readout(const PlatoonState& x, const PlatoonConfig& cfg,
                                    const SafetyHeadways& tau,
                                    const std::map<int, double>& eta_by_hv = {}) {
  SafetyReadout r;
  r.h_head = h_head(x, tau.tau_head);
  r.h_tail = h_tail(x, tau.tau_tail);
  r.h_platoon = h_platoon(x, cfg, tau.tau_platoon);
  for (int i = 1; i <= cfg.n_hv; ++i) r.h_hv.push_back(h_hv(x, i, tau.tau(i)));
  for (int i : cfg.head_connected) {
    const double eta = eta_by_hv.count(i) ? eta_by_hv.at(i) : 0.5;
    r.h_bar_hv[i] = h_bar_hv(x, i, tau.tau(i), eta, tau.tau_head);
  }
  return r;
}

/// Certified safe gains for the nominal head controller: the range policy
/// must be no steeper than 1/tau, and the gap gain must dominate the speed
/// feedback terms. Boundary equality counts as safe.
inline bool head_gains_certified_safe(const CavGains& g, double tau_head, const RangePolicy& rp) {
  if (rp.kappa() > 1.0 / tau_head) return false;
  double feedback = std::abs(1.0 - tau_head * g.beta_head_d);
  for (const auto& [i, beta] : g.beta_head_hv) feedback += tau_head * std::abs(beta);
  feedback += tau_head * std::abs(g.beta_head_tail);
  return g.alpha_head >= feedback * rp.v_max / rp.s_st;
}

inline bool tail_gains_certified_safe(const CavGains& g, double tau_tail, const RangePolicy& rp) {
  if (rp.kappa() > 1.0 / tau_tail) return false;
  double feedback = std::abs(1.0 - tau_tail * g.beta_tail_n);
  for (const auto& [i, beta] : g.beta_tail_hv) feedback += tau_tail * std::abs(beta);
  feedback += tau_tail * std::abs(g.beta_tail_head);
  return g.alpha_tail >= feedback * rp.v_max / rp.s_st;
}

/// Which gain a safety-chart axis sweeps.
enum class GainAxis {
  BetaHeadTail,
  BetaTailHead,
  AlphaHead,
  BetaHeadD,
  AlphaTail,
  BetaTailN,
};

inline void set_gain(CavGains& g, GainAxis axis, double value) {
  switch (axis) {
    case GainAxis::BetaHeadTail: g.beta_head_tail = value; break;
    case GainAxis::BetaTailHead: g.beta_tail_head = value; break;
    case GainAxis::AlphaHead: g.alpha_head = value; break;
    case GainAxis::BetaHeadD: g.beta_head_d = value; break;
    case GainAxis::AlphaTail: g.alpha_tail = value; break;
    case GainAxis::BetaTailN: g.beta_tail_n = value; break;
  }
}

inline std::string gain_axis_name(GainAxis axis) {
  switch (axis) {
    case GainAxis::BetaHeadTail: return "beta_head_tail";
    case GainAxis::BetaTailHead: return "beta_tail_head";
    case GainAxis::AlphaHead: return "alpha_head";
    case GainAxis::BetaHeadD: return "beta_head_d";
    case GainAxis::AlphaTail: return "alpha_tail";
    case GainAxis::BetaTailN: return "beta_tail_n";
  }
  return "";
}

struct SafetyChartAxis {
  GainAxis gain = GainAxis::BetaHeadTail;
  double lo = 0, hi = 0;
  int count = 1;

  double value(int k) const { return count <= 1 ? lo : lo + (hi - lo) * k / (count - 1); }
};

struct SafetyChart {
  struct Cell {
    bool head_safe = false;
    bool tail_safe = false;
  };
  SafetyChartAxis x, y;
  std::vector<Cell> cells; // row-major, y outer

  Cell& at(int ix, int iy) { return cells[static_cast<std::size_t>(iy * x.count + ix)]; }
  const Cell& at(int ix, int iy) const {
    return cells[static_cast<std::size_t>(iy * x.count + ix)];
  }
};

/// Evaluates the closed-form certificates over a grid of two swept gains.
inline SafetyChart safety_chart(const SafetyChartAxis& x_axis, const SafetyChartAxis& y_axis,
                                const CavGains& base, const SafetyHeadways& tau,
                                const RangePolicy& rp) {
  SafetyChart chart;
  chart.x = x_axis;
  chart.y = y_axis;
  chart.cells.resize(static_cast<std::size_t>(x_axis.count) * static_cast<std::size_t>(y_axis.count));
  for (int iy = 0; iy < y_axis.count; ++iy)
    for (int ix = 0; ix < x_axis.count; ++ix) {
      CavGains g = base;
      set_gain(g, x_axis.gain, x_axis.value(ix));
      set_gain(g, y_axis.gain, y_axis.value(iy));
      chart.at(ix, iy) = {head_gains_certified_safe(g, tau.tau_head, rp),
                          tail_gains_certified_safe(g, tau.tau_tail, rp)};
    }
  return chart;
}

inline void write_csv(const SafetyChart& chart, std::ostream& os) {
  os << gain_axis_name(chart.x.gain) << ',' << gain_axis_name(chart.y.gain)
     << ",head_safe,tail_safe\n";
  for (int iy = 0; iy < chart.y.count; ++iy)
    for (int ix = 0; ix < chart.x.count; ++ix) {
      const auto& cell = chart.at(ix, iy);
      os << chart.x.value(ix) << ',' << chart.y.value(iy) << ',' << (cell.head_safe ? 1 : 0)
         << ',' << (cell.tail_safe ? 1 : 0) << '\n';
    }
}

} // namespace platoonlab
