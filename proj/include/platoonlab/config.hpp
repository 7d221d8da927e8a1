#pragma once

#include <platoonlab/simulate.hpp>

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

// JSON experiment configuration. Every field is optional and defaults to the
// baseline study values, so a minimal config describes only what it changes.
// Validation reports the offending field by path. The fully defaulted
// ("effective") config can be serialized back out for reproducibility.

namespace platoonlab {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ChartSpec {
  enum class Kind { Stability, Safety } kind = Kind::Stability;
  SafetyChartAxis x{GainAxis::BetaHeadTail, -1.0, 2.0, 61};
  SafetyChartAxis y{GainAxis::BetaTailHead, -1.0, 3.0, 61};
};

struct SweepSpec {
  enum class Kind { Gains, HvCount, HvParam } kind = Kind::Gains;
  AxisSpec x{-1.0, 2.0, 7};
  AxisSpec y{-1.0, 3.0, 9};
  bool bisect = true;
  std::vector<int> n_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<ControllerMode> modes{ControllerMode::Nominal, ControllerMode::CbfCav};
  HvParameter parameter = HvParameter::A;
  std::vector<double> values;
};

struct ExperimentSpec {
  std::string description;
  ExperimentParams params;
  Scenario scenario;
  ControllerMode mode = ControllerMode::Nominal;
  std::optional<ChartSpec> chart;
  std::optional<SweepSpec> sweep;

  static ExperimentSpec defaults() {
    ExperimentSpec spec;
    spec.params.cfg.n_hv = 4;
    spec.params.hv = std::vector<HvParams>(4, HvParams{});
    spec.params.gains.beta_head_tail = 0.5;
    spec.params.gains.beta_tail_head = 1.2;
    return spec;
  }
};

namespace config_detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(path + "." + key + ": unknown field");
}

inline double num(const json& obj, const std::string& key, double fallback,
                  const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return obj.at(key).get<double>();
}

inline int integer(const json& obj, const std::string& key, int fallback,
                   const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer())
    throw ConfigError(path + "." + key + ": expected an integer");
  return obj.at(key).get<int>();
}

inline ControllerMode parse_mode(const std::string& name, const std::string& path) {
  for (ControllerMode m : {ControllerMode::Nominal, ControllerMode::CbfCav,
                           ControllerMode::CbfCavHv, ControllerMode::CbfFull,
                           ControllerMode::RobustCbfCavHv})
    if (to_string(m) == name) return m;
  throw ConfigError(path + ": unknown controller mode '" + name + "'");
}

inline GainAxis parse_gain_axis(const std::string& name, const std::string& path) {
  for (GainAxis g : {GainAxis::BetaHeadTail, GainAxis::BetaTailHead, GainAxis::AlphaHead,
                     GainAxis::BetaHeadD, GainAxis::AlphaTail, GainAxis::BetaTailN})
    if (gain_axis_name(g) == name) return g;
  throw ConfigError(path + ": unknown gain axis '" + name + "'");
}

inline HvParams parse_hv_params(const json& obj, const HvParams& base, const std::string& path) {
  require_keys(obj, {"a", "b", "s_st", "s_go", "v_max"}, path);
  HvParams p = base;
  p.a = num(obj, "a", p.a, path);
  p.b = num(obj, "b", p.b, path);
  p.s_st = num(obj, "s_st", p.s_st, path);
  p.s_go = num(obj, "s_go", p.s_go, path);
  p.v_max = num(obj, "v_max", p.v_max, path);
  if (p.a < 0 || p.b < 0) throw ConfigError(path + ": a and b must be nonnegative");
  if (p.s_go <= p.s_st || p.s_st <= 0) throw ConfigError(path + ": require 0 < s_st < s_go");
  if (p.v_max <= 0) throw ConfigError(path + ": v_max must be positive");
  return p;
}

inline std::map<int, double> parse_gain_map(const json& obj, int n_hv, const std::string& path) {
  std::map<int, double> out;
  for (const auto& [key, value] : obj.items()) {
    int idx = 0;
    try {
      idx = std::stoi(key);
    } catch (...) {
      throw ConfigError(path + "." + key + ": key must be an HV index");
    }
    if (idx < 1 || idx > n_hv)
      throw ConfigError(path + "." + key + ": HV index out of range 1.." + std::to_string(n_hv));
    if (!value.is_number()) throw ConfigError(path + "." + key + ": expected a number");
    out[idx] = value.get<double>();
  }
  return out;
}

} // namespace config_detail

inline ExperimentSpec parse_experiment(const nlohmann::json& j) {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  require_keys(j, {"description", "platoon", "hv", "design_hv", "range_policy", "gains",
                   "headways", "cbf", "limits", "mode", "scenario", "chart", "sweep"},
               "config");

  ExperimentSpec spec = ExperimentSpec::defaults();
  spec.description = j.value("description", "");

  // platoon geometry first: everything else is sized by n_hv
  if (j.contains("platoon")) {
    const auto& p = j.at("platoon");
    require_keys(p, {"n_hv", "head_connected", "tail_connected", "hv_length", "tail_cav_length",
                     "platoon_base_length"}, "platoon");
    spec.params.cfg.n_hv = integer(p, "n_hv", spec.params.cfg.n_hv, "platoon");
    if (spec.params.cfg.n_hv < 1) throw ConfigError("platoon.n_hv: must be at least 1");
    for (const char* key : {"head_connected", "tail_connected"})
      if (p.contains(key)) {
        if (!p.at(key).is_array()) throw ConfigError(std::string("platoon.") + key + ": expected an array");
        auto& target = std::string(key) == "head_connected" ? spec.params.cfg.head_connected
                                                            : spec.params.cfg.tail_connected;
        for (const auto& v : p.at(key)) {
          if (!v.is_number_integer())
            throw ConfigError(std::string("platoon.") + key + ": expected integer indices");
          target.insert(v.get<int>());
        }
      }
    const double hv_len = num(p, "hv_length", 5.0, "platoon");
    spec.params.cfg.hv_lengths.assign(static_cast<std::size_t>(spec.params.cfg.n_hv), hv_len);
    spec.params.cfg.tail_cav_length =
        num(p, "tail_cav_length", spec.params.cfg.tail_cav_length, "platoon");
    spec.params.cfg.platoon_base_length =
        num(p, "platoon_base_length", spec.params.cfg.platoon_base_length, "platoon");
    try {
      spec.params.cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("platoon: ") + e.what());
    }
  }
  const int n = spec.params.cfg.n_hv;

  HvParams hv_base;
  if (j.contains("hv")) hv_base = parse_hv_params(j.at("hv"), HvParams{}, "hv");
  spec.params.hv.assign(static_cast<std::size_t>(n), hv_base);
  if (j.contains("design_hv"))
    spec.params.design_hv.assign(
        static_cast<std::size_t>(n), parse_hv_params(j.at("design_hv"), hv_base, "design_hv"));

  if (j.contains("range_policy")) {
    const auto& r = j.at("range_policy");
    require_keys(r, {"s_st", "s_go", "v_max"}, "range_policy");
    spec.params.rp.s_st = num(r, "s_st", spec.params.rp.s_st, "range_policy");
    spec.params.rp.s_go = num(r, "s_go", spec.params.rp.s_go, "range_policy");
    spec.params.rp.v_max = num(r, "v_max", spec.params.rp.v_max, "range_policy");
    if (spec.params.rp.s_go <= spec.params.rp.s_st || spec.params.rp.s_st <= 0)
      throw ConfigError("range_policy: require 0 < s_st < s_go");
  }

  if (j.contains("gains")) {
    const auto& g = j.at("gains");
    require_keys(g, {"alpha_head", "beta_head_d", "beta_head_tail", "alpha_tail", "beta_tail_n",
                     "beta_tail_head", "beta_head_hv", "beta_tail_hv"}, "gains");
    auto& gains = spec.params.gains;
    gains.alpha_head = num(g, "alpha_head", gains.alpha_head, "gains");
    gains.beta_head_d = num(g, "beta_head_d", gains.beta_head_d, "gains");
    gains.beta_head_tail = num(g, "beta_head_tail", gains.beta_head_tail, "gains");
    gains.alpha_tail = num(g, "alpha_tail", gains.alpha_tail, "gains");
    gains.beta_tail_n = num(g, "beta_tail_n", gains.beta_tail_n, "gains");
    gains.beta_tail_head = num(g, "beta_tail_head", gains.beta_tail_head, "gains");
    if (g.contains("beta_head_hv"))
      gains.beta_head_hv = parse_gain_map(g.at("beta_head_hv"), n, "gains.beta_head_hv");
    if (g.contains("beta_tail_hv"))
      gains.beta_tail_hv = parse_gain_map(g.at("beta_tail_hv"), n, "gains.beta_tail_hv");
  }
  for (int i : spec.params.cfg.head_connected)
    if (!spec.params.gains.beta_head_hv.count(i))
      spec.params.gains.beta_head_hv[i] = 0.0;
  for (int i : spec.params.cfg.tail_connected)
    if (!spec.params.gains.beta_tail_hv.count(i))
      spec.params.gains.beta_tail_hv[i] = 0.0;
  for (const auto& [i, beta] : spec.params.gains.beta_head_hv)
    if (!spec.params.cfg.head_connected.count(i))
      throw ConfigError("gains.beta_head_hv." + std::to_string(i) + ": HV is not head-connected");
  for (const auto& [i, beta] : spec.params.gains.beta_tail_hv)
    if (!spec.params.cfg.tail_connected.count(i))
      throw ConfigError("gains.beta_tail_hv." + std::to_string(i) + ": HV is not tail-connected");

  double tau_hv_default = 1.0;
  if (j.contains("headways")) {
    const auto& h = j.at("headways");
    require_keys(h, {"tau_head", "tau_tail", "tau_platoon", "tau_hv"}, "headways");
    auto& tau = spec.params.headways;
    tau.tau_head = num(h, "tau_head", tau.tau_head, "headways");
    tau.tau_tail = num(h, "tau_tail", tau.tau_tail, "headways");
    tau.tau_platoon = num(h, "tau_platoon", tau.tau_platoon, "headways");
    tau_hv_default = num(h, "tau_hv", tau_hv_default, "headways");
    if (tau.tau_head <= 0 || tau.tau_tail <= 0 || tau.tau_platoon <= 0 || tau_hv_default <= 0)
      throw ConfigError("headways: all headways must be positive");
  }
  spec.params.headways.tau_hv.assign(static_cast<std::size_t>(n), tau_hv_default);

  if (j.contains("cbf")) {
    const auto& c = j.at("cbf");
    require_keys(c, {"gamma_head", "gamma_tail", "gamma_platoon", "hv"}, "cbf");
    spec.params.cbf.gamma_head = num(c, "gamma_head", spec.params.cbf.gamma_head, "cbf");
    spec.params.cbf.gamma_tail = num(c, "gamma_tail", spec.params.cbf.gamma_tail, "cbf");
    spec.params.cbf.gamma_platoon = num(c, "gamma_platoon", spec.params.cbf.gamma_platoon, "cbf");
    if (spec.params.cbf.gamma_head <= 0 || spec.params.cbf.gamma_tail <= 0 ||
        spec.params.cbf.gamma_platoon <= 0)
      throw ConfigError("cbf: all gamma rates must be positive");
    if (c.contains("hv")) {
      for (const auto& [key, value] : c.at("hv").items()) {
        const std::string path = "cbf.hv." + key;
        int idx = 0;
        try {
          idx = std::stoi(key);
        } catch (...) {
          throw ConfigError(path + ": key must be an HV index");
        }
        if (idx < 1 || idx > n) throw ConfigError(path + ": HV index out of range");
        require_keys(value, {"tau", "gamma", "eta", "penalty", "d_bar"}, path);
        HvCbfParams p;
        p.tau = num(value, "tau", p.tau, path);
        p.gamma = num(value, "gamma", p.gamma, path);
        p.eta = num(value, "eta", p.eta, path);
        p.penalty = num(value, "penalty", p.penalty, path);
        p.d_bar = num(value, "d_bar", p.d_bar, path);
        if (p.tau <= 0 || p.gamma <= 0 || p.eta <= 0 || p.penalty <= 0 || p.d_bar < 0)
          throw ConfigError(path + ": invalid barrier parameters");
        spec.params.cbf.hv[idx] = p;
      }
    }
  }
  for (int i : spec.params.cfg.head_connected)
    if (!spec.params.cbf.hv.count(i)) spec.params.cbf.hv[i] = HvCbfParams{};

  if (j.contains("limits")) {
    const auto& l = j.at("limits");
    require_keys(l, {"u_min", "u_max"}, "limits");
    spec.params.limits.u_min = num(l, "u_min", spec.params.limits.u_min, "limits");
    spec.params.limits.u_max = num(l, "u_max", spec.params.limits.u_max, "limits");
    if (spec.params.limits.u_min >= 0 || spec.params.limits.u_max <= 0)
      throw ConfigError("limits: require u_min < 0 < u_max");
  }

  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) throw ConfigError("mode: expected a string");
    spec.mode = parse_mode(j.at("mode").get<std::string>(), "mode");
  }

  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    require_keys(s, {"kind", "hv_index", "accel", "delta_v", "t_start", "horizon", "dt", "v_star"},
                 "scenario");
    if (s.contains("kind")) {
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "head_hv_decel") spec.scenario.kind = Scenario::Kind::HeadHvDecel;
      else if (kind == "middle_hv_decel") spec.scenario.kind = Scenario::Kind::MiddleHvDecel;
      else if (kind == "middle_hv_accel") spec.scenario.kind = Scenario::Kind::MiddleHvAccel;
      else throw ConfigError("scenario.kind: unknown kind '" + kind + "'");
    }
    spec.scenario.hv_index = integer(s, "hv_index", spec.scenario.hv_index, "scenario");
    spec.scenario.accel = num(s, "accel", spec.scenario.accel, "scenario");
    spec.scenario.delta_v = num(s, "delta_v", spec.scenario.delta_v, "scenario");
    spec.scenario.t_start = num(s, "t_start", spec.scenario.t_start, "scenario");
    spec.scenario.horizon = num(s, "horizon", spec.scenario.horizon, "scenario");
    spec.scenario.dt = num(s, "dt", spec.scenario.dt, "scenario");
    spec.scenario.v_star = num(s, "v_star", spec.scenario.v_star, "scenario");
  }
  try {
    spec.scenario.validate(n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (spec.scenario.v_star <= 0 || spec.scenario.v_star >= spec.params.rp.v_max ||
      spec.scenario.v_star >= hv_base.v_max)
    throw ConfigError("scenario.v_star: equilibrium speed must lie inside (0, v_max)");

  if (j.contains("chart")) {
    const auto& c = j.at("chart");
    require_keys(c, {"kind", "x", "y"}, "chart");
    ChartSpec chart;
    if (c.contains("kind")) {
      const std::string kind = c.at("kind").get<std::string>();
      if (kind == "stability") chart.kind = ChartSpec::Kind::Stability;
      else if (kind == "safety") chart.kind = ChartSpec::Kind::Safety;
      else throw ConfigError("chart.kind: unknown kind '" + kind + "'");
    }
    auto parse_axis = [&](const char* key, SafetyChartAxis fallback) {
      if (!c.contains(key)) return fallback;
      const auto& a = c.at(key);
      const std::string path = std::string("chart.") + key;
      require_keys(a, {"gain", "lo", "hi", "count"}, path);
      SafetyChartAxis axis = fallback;
      if (a.contains("gain"))
        axis.gain = parse_gain_axis(a.at("gain").get<std::string>(), path + ".gain");
      axis.lo = num(a, "lo", axis.lo, path);
      axis.hi = num(a, "hi", axis.hi, path);
      axis.count = integer(a, "count", axis.count, path);
      if (axis.count < 1) throw ConfigError(path + ".count: must be at least 1");
      if (axis.count > 1 && axis.hi <= axis.lo)
        throw ConfigError(path + ": require lo < hi for a multi-point axis");
      return axis;
    };
    chart.x = parse_axis("x", chart.x);
    chart.y = parse_axis("y", chart.y);
    spec.chart = chart;
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    require_keys(s, {"kind", "x", "y", "bisect", "n_values", "modes", "parameter", "values"},
                 "sweep");
    SweepSpec sweep;
    const std::string kind = s.value("kind", "gains");
    if (kind == "gains") sweep.kind = SweepSpec::Kind::Gains;
    else if (kind == "hv_count") sweep.kind = SweepSpec::Kind::HvCount;
    else if (kind == "hv_param") sweep.kind = SweepSpec::Kind::HvParam;
    else throw ConfigError("sweep.kind: unknown kind '" + kind + "'");
    auto parse_axis = [&](const char* key, AxisSpec fallback) {
      if (!s.contains(key)) return fallback;
      const auto& a = s.at(key);
      const std::string path = std::string("sweep.") + key;
      require_keys(a, {"lo", "hi", "count"}, path);
      AxisSpec axis = fallback;
      axis.lo = num(a, "lo", axis.lo, path);
      axis.hi = num(a, "hi", axis.hi, path);
      axis.count = integer(a, "count", axis.count, path);
      if (axis.count < 1) throw ConfigError(path + ".count: must be at least 1");
      return axis;
    };
    sweep.x = parse_axis("x", sweep.x);
    sweep.y = parse_axis("y", sweep.y);
    if (s.contains("bisect")) sweep.bisect = s.at("bisect").get<bool>();
    if (s.contains("n_values")) {
      sweep.n_values.clear();
      for (const auto& v : s.at("n_values")) {
        const int count = v.get<int>();
        if (count < 1) throw ConfigError("sweep.n_values: platoon sizes must be positive");
        sweep.n_values.push_back(count);
      }
    }
    if (s.contains("modes")) {
      sweep.modes.clear();
      for (const auto& m : s.at("modes"))
        sweep.modes.push_back(parse_mode(m.get<std::string>(), "sweep.modes"));
    }
    if (s.contains("parameter")) {
      const std::string p = s.at("parameter").get<std::string>();
      if (p == "a") sweep.parameter = HvParameter::A;
      else if (p == "b") sweep.parameter = HvParameter::B;
      else if (p == "s_st") sweep.parameter = HvParameter::SSt;
      else if (p == "s_go") sweep.parameter = HvParameter::SGo;
      else throw ConfigError("sweep.parameter: unknown parameter '" + p + "'");
    }
    if (s.contains("values"))
      for (const auto& v : s.at("values")) sweep.values.push_back(v.get<double>());
    if (sweep.kind == SweepSpec::Kind::HvParam && sweep.values.empty())
      throw ConfigError("sweep.values: required for an hv_param sweep");
    spec.sweep = sweep;
  }

  try {
    spec.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

inline nlohmann::json effective_config(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["description"] = spec.description;
  j["platoon"] = {{"n_hv", spec.params.cfg.n_hv},
                  {"head_connected", spec.params.cfg.head_connected},
                  {"tail_connected", spec.params.cfg.tail_connected},
                  {"hv_length", spec.params.cfg.hv_length(1)},
                  {"tail_cav_length", spec.params.cfg.tail_cav_length},
                  {"platoon_base_length", spec.params.cfg.platoon_base_length}};
  const HvParams& hv = spec.params.hv.front();
  j["hv"] = {{"a", hv.a}, {"b", hv.b}, {"s_st", hv.s_st}, {"s_go", hv.s_go}, {"v_max", hv.v_max}};
  if (!spec.params.design_hv.empty()) {
    const HvParams& d = spec.params.design_hv.front();
    j["design_hv"] = {{"a", d.a}, {"b", d.b}, {"s_st", d.s_st}, {"s_go", d.s_go},
                      {"v_max", d.v_max}};
  }
  j["range_policy"] = {{"s_st", spec.params.rp.s_st},
                       {"s_go", spec.params.rp.s_go},
                       {"v_max", spec.params.rp.v_max}};
  nlohmann::json head_hv = nlohmann::json::object(), tail_hv = nlohmann::json::object();
  for (const auto& [i, beta] : spec.params.gains.beta_head_hv) head_hv[std::to_string(i)] = beta;
  for (const auto& [i, beta] : spec.params.gains.beta_tail_hv) tail_hv[std::to_string(i)] = beta;
  j["gains"] = {{"alpha_head", spec.params.gains.alpha_head},
                {"beta_head_d", spec.params.gains.beta_head_d},
                {"beta_head_tail", spec.params.gains.beta_head_tail},
                {"alpha_tail", spec.params.gains.alpha_tail},
                {"beta_tail_n", spec.params.gains.beta_tail_n},
                {"beta_tail_head", spec.params.gains.beta_tail_head},
                {"beta_head_hv", head_hv},
                {"beta_tail_hv", tail_hv}};
  j["headways"] = {{"tau_head", spec.params.headways.tau_head},
                   {"tau_tail", spec.params.headways.tau_tail},
                   {"tau_platoon", spec.params.headways.tau_platoon},
                   {"tau_hv", spec.params.headways.tau(1)}};
  nlohmann::json cbf_hv = nlohmann::json::object();
  for (const auto& [i, p] : spec.params.cbf.hv)
    cbf_hv[std::to_string(i)] = {{"tau", p.tau}, {"gamma", p.gamma}, {"eta", p.eta},
                                 {"penalty", p.penalty}, {"d_bar", p.d_bar}};
  j["cbf"] = {{"gamma_head", spec.params.cbf.gamma_head},
              {"gamma_tail", spec.params.cbf.gamma_tail},
              {"gamma_platoon", spec.params.cbf.gamma_platoon},
              {"hv", cbf_hv}};
  j["limits"] = {{"u_min", spec.params.limits.u_min}, {"u_max", spec.params.limits.u_max}};
  j["mode"] = to_string(spec.mode);
  const char* kind = spec.scenario.kind == Scenario::Kind::HeadHvDecel     ? "head_hv_decel"
                     : spec.scenario.kind == Scenario::Kind::MiddleHvDecel ? "middle_hv_decel"
                                                                           : "middle_hv_accel";
  j["scenario"] = {{"kind", kind},
                   {"hv_index", spec.scenario.hv_index},
                   {"accel", spec.scenario.accel},
                   {"delta_v", spec.scenario.delta_v},
                   {"t_start", spec.scenario.t_start},
                   {"horizon", spec.scenario.horizon},
                   {"dt", spec.scenario.dt},
                   {"v_star", spec.scenario.v_star}};
  if (spec.chart) {
    auto axis = [](const SafetyChartAxis& a) {
      return nlohmann::json{{"gain", gain_axis_name(a.gain)}, {"lo", a.lo}, {"hi", a.hi},
                            {"count", a.count}};
    };
    j["chart"] = {{"kind", spec.chart->kind == ChartSpec::Kind::Stability ? "stability" : "safety"},
                  {"x", axis(spec.chart->x)},
                  {"y", axis(spec.chart->y)}};
  }
  if (spec.sweep) {
    const auto& s = *spec.sweep;
    nlohmann::json sj;
    sj["kind"] = s.kind == SweepSpec::Kind::Gains     ? "gains"
                 : s.kind == SweepSpec::Kind::HvCount ? "hv_count"
                                                      : "hv_param";
    sj["x"] = {{"lo", s.x.lo}, {"hi", s.x.hi}, {"count", s.x.count}};
    sj["y"] = {{"lo", s.y.lo}, {"hi", s.y.hi}, {"count", s.y.count}};
    sj["bisect"] = s.bisect;
    sj["n_values"] = s.n_values;
    std::vector<std::string> modes;
    for (ControllerMode m : s.modes) modes.push_back(to_string(m));
    sj["modes"] = modes;
    sj["parameter"] = to_string(s.parameter);
    sj["values"] = s.values;
    j["sweep"] = sj;
  }
  return j;
}

inline ExperimentSpec load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  return parse_experiment(j);
}

} // namespace platoonlab
