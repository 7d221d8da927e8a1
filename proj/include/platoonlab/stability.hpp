#pragma once

#include <platoonlab/parallel.hpp>
#include <platoonlab/platoon.hpp>
#include <platoonlab/polynomial.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <ostream>
#include <vector>

// Linearization of the closed loop about equilibrium, the head-to-tail
// transfer function G(s) = N(s)/D(s) assembled from the per-vehicle factors,
// and plant / string stability classification over gain grids.

namespace platoonlab {

/// Partial derivatives of the HV acceleration at equilibrium:
/// a1 = dF/ds, a3 = dF/d(s_dot), a2 = dF/d(s_dot) - dF/dv.
struct HvLinearCoeffs {
  double a1 = 0, a2 = 0, a3 = 0;
};

struct CavLinearCoeffs {
  double xi_head = 0, eta_head = 0;
  double xi_tail = 0, eta_tail = 0;
};

inline HvLinearCoeffs hv_linear_coeffs(const HvParams& p, double s_star, double v_star) {
  (void)v_star; // the OVM partials at equilibrium do not depend on v directly
  if (s_star <= p.s_st || s_star >= p.s_go)
    throw std::invalid_argument("hv_linear_coeffs: equilibrium gap outside the linear branch");
  const double v_prime = p.range_policy().kappa();
  return {p.a * v_prime, p.a + p.b, p.b};
}

inline CavLinearCoeffs cav_linear_coeffs(const CavGains& g, const RangePolicy& rp,
                                         const PlatoonConfig& cfg, double v_star) {
  // both CAVs share the range policy, so their equilibrium gaps coincide
  const double s_star = cav_equilibrium_gap(rp, v_star);
  if (s_star <= rp.s_st || s_star >= rp.s_go)
    throw std::invalid_argument("cav_linear_coeffs: equilibrium gap outside the linear branch");
  CavLinearCoeffs c;
  c.xi_head = g.alpha_head * rp.kappa();
  c.xi_tail = g.alpha_tail * rp.kappa();
  c.eta_head = g.alpha_head + g.beta_head_d + g.beta_head_tail;
  for (int i : cfg.head_connected) c.eta_head += g.beta_head_hv.at(i);
  c.eta_tail = g.alpha_tail + g.beta_tail_n + g.beta_tail_head;
  for (int i : cfg.tail_connected) c.eta_tail += g.beta_tail_hv.at(i);
  return c;
}

/// State matrix A and input vector B of the linearized perturbation dynamics
/// x_dot = A x + B v_d, in the [s_H, v_H, s_1, v_1, ..., s_T, v_T] ordering.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> linearize(const PlatoonConfig& cfg,
                                                             const std::vector<HvParams>& hv,
                                                             const CavGains& g,
                                                             const RangePolicy& rp,
                                                             double v_star) {
  const int n_states = cfg.state_dim();
  const int n = cfg.n_hv;
  const CavLinearCoeffs cav = cav_linear_coeffs(g, rp, cfg, v_star);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_states, n_states);
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n_states);

  const int vH = 1;
  const int vT = n_states - 1;
  auto sI = [](int i) { return 2 * i; };     // gap row/column of HV-i
  auto vI = [](int i) { return 2 * i + 1; }; // speed row/column of HV-i

  A(0, vH) = -1.0;
  B(0) = 1.0;

  A(vH, 0) = cav.xi_head;
  A(vH, vH) = -cav.eta_head;
  for (int i : cfg.head_connected) A(vH, vI(i)) = g.beta_head_hv.at(i);
  A(vH, vT) = g.beta_head_tail;
  B(vH) = g.beta_head_d;

  for (int i = 1; i <= n; ++i) {
    const HvLinearCoeffs c =
        hv_linear_coeffs(hv[static_cast<std::size_t>(i - 1)],
                         hv_equilibrium_gap(hv[static_cast<std::size_t>(i - 1)], v_star), v_star);
    const int pred = (i == 1) ? vH : vI(i - 1);
    A(sI(i), pred) = 1.0;
    A(sI(i), vI(i)) = -1.0;
    A(vI(i), sI(i)) = c.a1;
    A(vI(i), vI(i)) = -c.a2;
    A(vI(i), pred) = c.a3;
  }

  A(vT - 1, vI(n)) = 1.0;
  A(vT - 1, vT) = -1.0;
  A(vT, vT - 1) = cav.xi_tail;
  A(vT, vT) = -cav.eta_tail;
  A(vT, vH) = g.beta_tail_head;
  for (int i : cfg.tail_connected) A(vT, vI(i)) = g.beta_tail_hv.at(i);
  A(vT, vI(n)) += g.beta_tail_n;

  return {A, B};
}

struct TransferFunction {
  RealPolynomial num, den;

  std::complex<double> eval(std::complex<double> s) const { return num.eval(s) / den.eval(s); }
  double gain(double omega) const { return std::abs(eval({0.0, omega})); }
};

/// Head-to-tail transfer function assembled from the HV chain factors
///   P_0 = prod(s^2 + a_j2 s + a_j1),  P_i with the first i factors replaced
/// by (a_j3 s + a_j1), and the two CAV controller quadratics.
inline TransferFunction build_transfer_function(const std::vector<HvLinearCoeffs>& hv,
                                                const CavLinearCoeffs& cav, const CavGains& g,
                                                const PlatoonConfig& cfg) {
  const int n = cfg.n_hv;
  if (static_cast<int>(hv.size()) != n)
    throw std::invalid_argument("build_transfer_function: one coefficient set per HV required");

  // chain[i] = P_i: the first i HV factors reduced to first order, the rest
  // quadratic. All products fold right-to-left so that P_0 and P_N share the
  // exact same constant term, which is what makes |G(0)| = 1 bit-exact.
  auto right_fold = [&](int i, auto factor_of) {
    RealPolynomial acc = RealPolynomial::constant(1.0);
    for (int j = i; j >= 1; --j) acc = factor_of(hv[static_cast<std::size_t>(j - 1)]) * acc;
    return acc;
  };
  std::vector<RealPolynomial> chain(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    RealPolynomial quads = RealPolynomial::constant(1.0);
    for (int j = n; j >= i + 1; --j) {
      const auto& c = hv[static_cast<std::size_t>(j - 1)];
      quads = RealPolynomial::quadratic(c.a1, c.a2, 1.0) * quads;
    }
    const RealPolynomial lins =
        right_fold(i, [](const HvLinearCoeffs& c) { return RealPolynomial::linear(c.a1, c.a3); });
    chain[static_cast<std::size_t>(i)] = lins * quads;
  }

  const RealPolynomial s({0.0, 1.0});
  const auto& p0 = chain[0];
  const auto& pn = chain[static_cast<std::size_t>(n)];
  const RealPolynomial quad_head = RealPolynomial::quadratic(cav.xi_head, cav.eta_head, 1.0);
  const RealPolynomial quad_tail = RealPolynomial::quadratic(cav.xi_tail, cav.eta_tail, 1.0);

  // feedback paths into the tail CAV: head cooperation, ACC on HV-N, V2V HVs
  RealPolynomial tail_paths = g.beta_tail_head * (s * p0) +
                              RealPolynomial::linear(cav.xi_tail, g.beta_tail_n) * pn;
  for (int i : cfg.tail_connected)
    tail_paths = tail_paths + g.beta_tail_hv.at(i) * (s * chain[static_cast<std::size_t>(i)]);

  TransferFunction tf;
  tf.num = RealPolynomial::linear(cav.xi_head, g.beta_head_d) * tail_paths;
  tf.den = quad_head * (p0 * quad_tail) - g.beta_head_tail * (s * tail_paths);
  for (int i : cfg.head_connected)
    tf.den = tf.den -
             g.beta_head_hv.at(i) * (s * (chain[static_cast<std::size_t>(i)] * quad_tail));
  return tf;
}

/// Roots of D(s) strictly in the left half plane; a -1e-9 margin keeps
/// marginal numerical zeros out of the stable class.
inline bool plant_stable(const TransferFunction& tf) {
  for (const auto& r : polynomial_roots(tf.den))
    if (r.real() >= -1e-9) return false;
  return true;
}

/// Coefficient of omega^2 in |P(j omega)|^2 minus the constant term, i.e.
/// the first nonconstant term of the squared magnitude.
inline double squared_magnitude_omega2_coeff(const RealPolynomial& p) {
  return p[1] * p[1] - 2.0 * p[0] * p[2];
}

struct StringStabilityAnalysis {
  double sup_gain = 0;          // sup over omega > 0 of |G(j omega)|, sampled and refined
  double omega_at_sup = 0;
  double small_omega_margin = 0; // lim (|D|^2-|N|^2)/omega^2 as omega -> 0+
  bool stable = false;
};

/// Frequency criterion: |G(j omega)| < 1 for all omega > 0. Since |G(0)| = 1,
/// the limit omega -> 0+ is resolved analytically from the omega^2 terms of
/// |D|^2 - |N|^2; away from zero a log-spaced sweep with golden-section
/// refinement bounds the supremum.
inline StringStabilityAnalysis analyze_string_stability(const TransferFunction& tf,
                                                        int samples = 400,
                                                        double omega_min = 1e-3,
                                                        double omega_max = 1e2) {
  StringStabilityAnalysis out;
  out.small_omega_margin =
      squared_magnitude_omega2_coeff(tf.den) - squared_magnitude_omega2_coeff(tf.num);

  const double lmin = std::log10(omega_min), lmax = std::log10(omega_max);
  auto gain_at = [&](double logw) { return tf.gain(std::pow(10.0, logw)); };

  int best = 0;
  double best_gain = -1.0;
  for (int k = 0; k < samples; ++k) {
    const double lw = lmin + (lmax - lmin) * k / (samples - 1);
    const double gk = gain_at(lw);
    if (gk > best_gain) {
      best_gain = gk;
      best = k;
    }
  }

  const double step = (lmax - lmin) / (samples - 1);
  double lo = lmin + step * std::max(0, best - 1);
  double hi = lmin + step * std::min(samples - 1, best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = gain_at(c), fd = gain_at(d);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = gain_at(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = gain_at(d);
    }
  }
  const double lw_star = (fc > fd) ? c : d;
  const double refined = std::max(best_gain, gain_at(lw_star));
  out.sup_gain = refined;
  out.omega_at_sup = std::pow(10.0, (refined > best_gain) ? lw_star : lmin + step * best);
  out.stable = out.sup_gain < 1.0 && out.small_omega_margin > 0.0;
  return out;
}

inline bool string_stable(const TransferFunction& tf) {
  return analyze_string_stability(tf).stable;
}

/// e_out^T (j omega I - A)^{-1} B, the state-space frequency response used to
/// cross-check the transfer function.
inline std::complex<double> freq_response(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                          int output_index, double omega) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXcd M = std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) -
                       A.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  if (!lu.isInvertible())
    throw std::runtime_error("freq_response: j*omega*I - A is singular at this frequency");
  const Eigen::VectorXcd x = lu.solve(B.cast<std::complex<double>>());
  return x(output_index);
}

struct AxisSpec {
  double lo = 0, hi = 0;
  int count = 1;

  double value(int k) const {
    return count <= 1 ? lo : lo + (hi - lo) * k / (count - 1);
  }
};

struct StabilityChart {
  struct Cell {
    bool plant_stable = false;
    bool string_stable = false;
  };
  AxisSpec beta_head_tail, beta_tail_head;
  std::vector<Cell> cells; // row-major: y (beta_tail_head) outer, x inner

  Cell& at(int ix, int iy) { return cells[static_cast<std::size_t>(iy * beta_head_tail.count + ix)]; }
  const Cell& at(int ix, int iy) const {
    return cells[static_cast<std::size_t>(iy * beta_head_tail.count + ix)];
  }
};

/// Classifies every (beta_head_tail, beta_tail_head) cell independently.
/// String stability is only evaluated on plant-stable cells; the rest are
/// marked string-unstable.
inline StabilityChart stability_chart(const AxisSpec& x_axis, const AxisSpec& y_axis,
                                      const CavGains& base, const PlatoonConfig& cfg,
                                      const std::vector<HvParams>& hv, const RangePolicy& rp,
                                      double v_star, int workers = 1) {
  StabilityChart chart;
  chart.beta_head_tail = x_axis;
  chart.beta_tail_head = y_axis;
  chart.cells.resize(static_cast<std::size_t>(x_axis.count) * static_cast<std::size_t>(y_axis.count));

  std::vector<HvLinearCoeffs> hv_coeffs;
  hv_coeffs.reserve(hv.size());
  for (const auto& p : hv) hv_coeffs.push_back(hv_linear_coeffs(p, hv_equilibrium_gap(p, v_star), v_star));

  parallel_for(static_cast<int>(chart.cells.size()), workers, [&](int idx) {
    const int ix = idx % x_axis.count;
    const int iy = idx / x_axis.count;
    CavGains g = base;
    g.beta_head_tail = x_axis.value(ix);
    g.beta_tail_head = y_axis.value(iy);
    const TransferFunction tf =
        build_transfer_function(hv_coeffs, cav_linear_coeffs(g, rp, cfg, v_star), g, cfg);
    StabilityChart::Cell cell;
    cell.plant_stable = plant_stable(tf);
    cell.string_stable = cell.plant_stable && string_stable(tf);
    chart.cells[static_cast<std::size_t>(idx)] = cell;
  });
  return chart;
}

inline void write_csv(const StabilityChart& chart, std::ostream& os) {
  os << "beta_head_tail,beta_tail_head,plant_stable,string_stable\n";
  for (int iy = 0; iy < chart.beta_tail_head.count; ++iy)
    for (int ix = 0; ix < chart.beta_head_tail.count; ++ix) {
      const auto& cell = chart.at(ix, iy);
      os << chart.beta_head_tail.value(ix) << ',' << chart.beta_tail_head.value(iy) << ','
         << (cell.plant_stable ? 1 : 0) << ',' << (cell.string_stable ? 1 : 0) << '\n';
    }
}

} // namespace platoonlab
