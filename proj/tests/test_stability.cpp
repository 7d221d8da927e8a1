#include <catch2/catch_amalgamated.hpp>

#include <platoonlab/stability.hpp>

#include "oracles.hpp"

#include <random>

using namespace platoonlab;

namespace {

struct RandomSetup {
  PlatoonConfig cfg;
  std::vector<HvParams> hv;
  RangePolicy rp{2.0, 40.0, 40.0};
  CavGains gains;
  double v_star = 20.0;
};

RandomSetup random_setup(std::mt19937& rng, int max_hv = 5) {
  std::uniform_real_distribution<double> pos(0.1, 0.9);
  std::uniform_real_distribution<double> gain(-0.5, 1.5);
  RandomSetup s;
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

TransferFunction transfer_of(const RandomSetup& s) {
  std::vector<HvLinearCoeffs> hc;
  for (const auto& p : s.hv)
    hc.push_back(hv_linear_coeffs(p, hv_equilibrium_gap(p, s.v_star), s.v_star));
  return build_transfer_function(hc, cav_linear_coeffs(s.gains, s.rp, s.cfg, s.v_star), s.gains,
                                 s.cfg);
}

// chart base setups: four calibrated HVs, ACC gains 0.4/0.6 on both
// CAVs, cooperation gains provided per test.
RandomSetup chart_base_no_connection() {
  RandomSetup s;
  s.cfg.n_hv = 4;
  s.hv = std::vector<HvParams>(4, HvParams{});
  s.gains = CavGains{};
  s.gains.beta_head_tail = 0.0;
  s.gains.beta_tail_head = 0.0;
  s.v_star = 20.0;
  return s;
}

RandomSetup chart_base_tail_look_ahead() {
  RandomSetup s = chart_base_no_connection();
  s.cfg.tail_connected = {1, 2, 3};
  s.gains.beta_tail_hv = {{1, 0.4}, {2, 0.5}, {3, 0.5}};
  return s;
}

} // namespace

TEST_CASE("hv linear coefficients match analytic values and finite differences") {
  const HvParams p{0.16, 0.16, 1.9, 46.3, 40.0};
  const double s_star = hv_equilibrium_gap(p, 20.0);
  HvLinearCoeffs c = hv_linear_coeffs(p, s_star, 20.0);
  CHECK(c.a1 == Catch::Approx(0.16 * 40.0 / 44.4).epsilon(1e-12));
  CHECK(c.a2 == Catch::Approx(0.32));
  CHECK(c.a3 == Catch::Approx(0.16));

  // finite-difference cross-check of all three partials at equilibrium
  using oracles::central_diff;
  const double fd_s = central_diff([&](double s) { return ovm_accel(p, s, 20.0, 0.0); }, s_star);
  const double fd_v = central_diff([&](double v) { return ovm_accel(p, s_star, v, 0.0); }, 20.0);
  const double fd_sd = central_diff([&](double sd) { return ovm_accel(p, s_star, 20.0, sd); }, 0.0);
  CHECK(c.a1 == Catch::Approx(fd_s).margin(1e-5));
  CHECK(c.a3 == Catch::Approx(fd_sd).margin(1e-5));
  CHECK(c.a2 == Catch::Approx(fd_sd - fd_v).margin(1e-5));

  HvParams degenerate;
  degenerate.a = 0.0;
  degenerate.b = 0.0;
  HvLinearCoeffs z = hv_linear_coeffs(degenerate, hv_equilibrium_gap(degenerate, 20.0), 20.0);
  CHECK(z.a1 == 0.0);
  CHECK(z.a2 == 0.0);
  CHECK(z.a3 == 0.0);

  CHECK_THROWS_AS(hv_linear_coeffs(p, p.s_st, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hv_linear_coeffs(p, p.s_go + 1.0, 40.0), std::invalid_argument);
}

TEST_CASE("linearized matrix for N=1 matches hand expansion") {
  PlatoonConfig cfg;
  cfg.n_hv = 1;
  std::vector<HvParams> hv{HvParams{}};
  RangePolicy rp{2.0, 40.0, 40.0};
  CavGains g;
  g.beta_head_tail = 0.5;
  g.beta_tail_head = 1.2;

  auto [A, B] = linearize(cfg, hv, g, rp, 20.0);
  REQUIRE(A.rows() == 6);

  const double kappa = rp.kappa();
  const double xi_h = g.alpha_head * kappa;
  const double eta_h = g.alpha_head + g.beta_head_d + g.beta_head_tail;
  const double xi_t = g.alpha_tail * kappa;
  const double eta_t = g.alpha_tail + g.beta_tail_n + g.beta_tail_head;
  const auto c = hv_linear_coeffs(hv[0], hv_equilibrium_gap(hv[0], 20.0), 20.0);

  Eigen::MatrixXd expected(6, 6);
  // rows: s_H, v_H, s_1, v_1, s_T, v_T
  expected << 0, -1, 0, 0, 0, 0,                     //
      xi_h, -eta_h, 0, 0, 0, g.beta_head_tail,       //
      0, 1, 0, -1, 0, 0,                             //
      0, c.a3, c.a1, -c.a2, 0, 0,                    //
      0, 0, 0, 1, 0, -1,                             //
      0, g.beta_tail_head, 0, g.beta_tail_n, xi_t, -eta_t;
  CHECK((A - expected).lpNorm<Eigen::Infinity>() < 1e-14);

  Eigen::VectorXd b_expected(6);
  b_expected << 1, g.beta_head_d, 0, 0, 0, 0;
  CHECK((B - b_expected).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("input vector has exactly two nonzeros") {
  std::mt19937 rng(21);
  for (int t = 0; t < 10; ++t) {
    RandomSetup s = random_setup(rng);
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    CHECK(B(0) == 1.0);
    CHECK(B(1) == s.gains.beta_head_d);
    for (int k = 2; k < B.size(); ++k) CHECK(B(k) == 0.0);
  }
}

TEST_CASE("finite-difference Jacobian of the unsaturated closed loop matches A") {
  std::mt19937 rng(31);
  const ActuationLimits wide{-1e9, 1e9};
  for (int t = 0; t < 5; ++t) {
    RandomSetup s = random_setup(rng);
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    const PlatoonState eq = assemble_equilibrium(s.cfg, s.hv, s.rp, s.v_star);
    const Eigen::VectorXd x0 = eq.to_vector();
    const int n = s.cfg.state_dim();

    auto rhs = [&](const Eigen::VectorXd& xv, double v_d) {
      const PlatoonState x = PlatoonState::from_vector(xv, s.cfg.n_hv);
      return closed_loop_rhs(x, v_d, nominal_head(x, v_d, s.gains, s.rp, s.cfg),
                             nominal_tail(x, s.gains, s.rp, s.cfg), s.hv, {}, wide);
    };

    const double h = 1e-6;
    Eigen::MatrixXd J(n, n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp(k) += h;
      xm(k) -= h;
      J.col(k) = (rhs(xp, s.v_star) - rhs(xm, s.v_star)) / (2.0 * h);
    }
    REQUIRE((J - A).lpNorm<Eigen::Infinity>() < 1e-5);

    const Eigen::VectorXd b_fd =
        (rhs(x0, s.v_star + h) - rhs(x0, s.v_star - h)) / (2.0 * h);
    REQUIRE((b_fd - B).lpNorm<Eigen::Infinity>() < 1e-5);
  }
}

TEST_CASE("transfer function degree and unit static gain") {
  std::mt19937 rng(41);
  for (int t = 0; t < 50; ++t) {
    RandomSetup s = random_setup(rng);
    const TransferFunction tf = transfer_of(s);
    REQUIRE(tf.den.degree() == 2 * s.cfg.n_hv + 4);
    REQUIRE(tf.num.degree() < tf.den.degree());
    REQUIRE(tf.num[0] / tf.den[0] == 1.0); // |G(0)| = 1 as a ratio of constants
  }
}

TEST_CASE("roots of D equal eigenvalues of A") {
  std::mt19937 rng(51);
  for (int t = 0; t < 30; ++t) {
    RandomSetup s = random_setup(rng);
    const TransferFunction tf = transfer_of(s);
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    const Eigen::VectorXcd eig = A.eigenvalues();
    std::vector<std::complex<double>> eigv(eig.data(), eig.data() + eig.size());
    REQUIRE(oracles::multiset_distance(polynomial_roots(tf.den), eigv) < 1e-6);
  }
}

TEST_CASE("transfer function matches state-space frequency response") {
  std::mt19937 rng(61);
  for (int t = 0; t < 10; ++t) {
    RandomSetup s = random_setup(rng);
    const TransferFunction tf = transfer_of(s);
    auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
    const int out = s.cfg.state_dim() - 1; // tail CAV speed
    for (int k = 0; k < 50; ++k) {
      const double omega = std::pow(10.0, -3.0 + 5.0 * k / 49.0);
      const std::complex<double> via_tf = tf.eval({0.0, omega});
      const std::complex<double> via_ss = freq_response(A, B, out, omega);
      REQUIRE(std::abs(via_tf - via_ss) < 1e-8);
    }
  }
}

TEST_CASE("frequency response limits") {
  RandomSetup s = chart_base_no_connection();
  s.gains.beta_tail_head = 1.2;
  s.gains.beta_head_tail = 0.5;
  auto [A, B] = linearize(s.cfg, s.hv, s.gains, s.rp, s.v_star);
  const int out = s.cfg.state_dim() - 1;
  CHECK(std::abs(freq_response(A, B, out, 1e6)) < 1e-4);     // strictly proper
  CHECK(std::abs(freq_response(A, B, out, 1e-7)) == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("ACC-only platoon is string unstable, tail look-ahead stabilizes") {
  const TransferFunction acc_only = transfer_of(chart_base_no_connection());
  CHECK(plant_stable(acc_only));
  CHECK_FALSE(string_stable(acc_only));

  const TransferFunction look_ahead = transfer_of(chart_base_tail_look_ahead());
  CHECK(plant_stable(look_ahead));
  CHECK(string_stable(look_ahead));
}

TEST_CASE("plant stability classification") {
  TransferFunction stable;
  stable.num = RealPolynomial::constant(2.0);
  stable.den = RealPolynomial::linear(1.0, 1.0) * RealPolynomial::linear(2.0, 1.0);
  CHECK(plant_stable(stable));

  TransferFunction unstable;
  unstable.num = RealPolynomial::constant(1.0);
  unstable.den = RealPolynomial::linear(-0.1, 1.0) * RealPolynomial::linear(1.0, 1.0);
  CHECK_FALSE(plant_stable(unstable));
}

TEST_CASE("stability chart spot checks and 1x1 grid consistency") {
  RandomSetup base = chart_base_no_connection();
  const AxisSpec x{0.0, 0.0, 1};
  const AxisSpec y{0.0, 1.0, 2};
  const StabilityChart chart =
      stability_chart(x, y, base.gains, base.cfg, base.hv, base.rp, base.v_star, 2);

  CHECK(chart.at(0, 0).plant_stable);
  CHECK_FALSE(chart.at(0, 0).string_stable);
  CHECK(chart.at(0, 1).string_stable); // (0, 1.0): cooperation from the tail CAV

  // a 1x1 grid is exactly a direct classification call
  const StabilityChart single = stability_chart({0.4, 0.4, 1}, {0.9, 0.9, 1}, base.gains,
                                                base.cfg, base.hv, base.rp, base.v_star, 1);
  CavGains g = base.gains;
  g.beta_head_tail = 0.4;
  g.beta_tail_head = 0.9;
  RandomSetup direct = base;
  direct.gains = g;
  const TransferFunction tf = transfer_of(direct);
  CHECK(single.at(0, 0).plant_stable == plant_stable(tf));
  CHECK(single.at(0, 0).string_stable == (plant_stable(tf) && string_stable(tf)));
}

TEST_CASE("csv export is row-major with one row per cell") {
  RandomSetup base = chart_base_no_connection();
  const StabilityChart chart = stability_chart({-0.5, 0.5, 2}, {0.0, 1.0, 2}, base.gains, base.cfg,
                                               base.hv, base.rp, base.v_star, 1);
  std::ostringstream os;
  write_csv(chart, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "beta_head_tail,beta_tail_head,plant_stable,string_stable");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("string stability flips across cells sit near an |G|=1 crossing") {
  // march up the beta_tail_head axis at beta_head_tail = 0, bisect the flip,
  // and verify the boundary equations hold there: G(j w) = exp(-j theta)
  RandomSetup base = chart_base_no_connection();
  auto classify = [&](double beta_th) {
    CavGains g = base.gains;
    g.beta_tail_head = beta_th;
    RandomSetup s = base;
    s.gains = g;
    const TransferFunction tf = transfer_of(s);
    return plant_stable(tf) && string_stable(tf);
  };

  double lo = 0.0, hi = 1.0;
  REQUIRE_FALSE(classify(lo));
  REQUIRE(classify(hi));
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (classify(mid) ? hi : lo) = mid;
  }

  CavGains g = base.gains;
  g.beta_tail_head = hi; // just inside the stable side of the boundary
  RandomSetup s = base;
  s.gains = g;
  const TransferFunction tf = transfer_of(s);
  const auto analysis = analyze_string_stability(tf);
  const std::complex<double> jw{0.0, analysis.omega_at_sup};
  const std::complex<double> num = tf.num.eval(jw);
  const std::complex<double> den = tf.den.eval(jw);
  const double theta = std::arg(den) - std::arg(num);
  const double residual = std::abs(den - num * std::polar(1.0, theta)) / std::abs(den);
  CHECK(residual < 1e-3);
}
