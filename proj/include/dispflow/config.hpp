// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file config.hpp
/// @brief RunConfig: a complete experiment description, with a strict JSON
/// reader/writer. The schema lives in docs/config_schema.md.

#include "dispflow/flow.hpp"

#include "json.hpp"

#include <array>
#include <limits>
#include <optional>
#include <set>
#include <string>

namespace dispflow {

enum class Scheme { Rk4, Rk4Projected };
enum class RhsChoice { Auto, Intrinsic, Extrinsic };

inline std::string to_string(Scheme s) { return s == Scheme::Rk4 ? "rk4" : "rk4-projected"; }

inline std::string to_string(RhsChoice r) {
  switch (r) {
    case RhsChoice::Auto: return "auto";
    case RhsChoice::Intrinsic: return "intrinsic";
    case RhsChoice::Extrinsic: return "extrinsic";
  }
  return "auto";
}

struct TargetSpec {
  TargetKind kind = TargetKind::UnitSphere;
  std::array<double, 3> axes{2.0, 1.0, 1.0};  // ellipsoid only

  Target make() const {
    switch (kind) {
      case TargetKind::UnitSphere: return Target::unit_sphere();
      case TargetKind::FlatTorus: return Target::flat_torus();
      case TargetKind::Ellipsoid: return Target::ellipsoid(axes[0], axes[1], axes[2]);
    }
    return Target::unit_sphere();
  }

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct StepperConfig {
  std::optional<double> dt;  // empty: use estimate_dt
  Scheme scheme = Scheme::Rk4Projected;
  double safety = 1.0;
  int renormalize_every = 1;
  bool dealias = false;

  friend bool operator==(const StepperConfig&, const StepperConfig&) = default;
};

struct RunConfig {
  TargetSpec target;
  InitialSpec initial;
  std::optional<std::string> preset;
  // Resolved: preset values overridden by explicit params. The curvature
  // field is filled from the target at run time (params_for_target).
  FlowParams params;
  int n = 64;
  StepperConfig stepper;
  RhsChoice rhs = RhsChoice::Auto;
  double t_end = 0.0;
  int snap_every = 1000;
  int diag_every = 100;
  int k = 4;
  bool compensated_sum = false;
  std::string output_dir = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The right-hand side a config actually integrates with.
inline RhsKind resolve_rhs(const RunConfig& cfg) {
  const bool sphere = cfg.target.kind == TargetKind::UnitSphere;
  const bool regularized = cfg.params.epsilon != 0.0;
  switch (cfg.rhs) {
    case RhsChoice::Auto:
      if (regularized) return RhsKind::Regularized;
      return sphere ? RhsKind::Extrinsic : RhsKind::Intrinsic;
    case RhsChoice::Intrinsic: return regularized ? RhsKind::Regularized : RhsKind::Intrinsic;
    case RhsChoice::Extrinsic:
      if (!sphere) throw ConfigError("rhs 'extrinsic' requires target 'sphere'");
      if (regularized) throw ConfigError("rhs 'extrinsic' cannot carry epsilon > 0");
      return RhsKind::Extrinsic;
  }
  return RhsKind::Intrinsic;
}

/// Copy of the params with the curvature filled in from the target.
inline FlowParams params_for_target(FlowParams p, const TargetSpec& target) {
  switch (target.kind) {
    case TargetKind::UnitSphere: p.curvature = 1.0; break;
    case TargetKind::FlatTorus: p.curvature = 0.0; break;
    case TargetKind::Ellipsoid: p.curvature = std::numeric_limits<double>::quiet_NaN(); break;
  }
  return p;
}

namespace detail {

using nlohmann::json;

inline std::string type_name(const json& j) { return j.type_name(); }

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw ConfigError("unknown key '" + where + it.key() + "'");
    }
  }
}

inline double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError("key '" + where + key + "': expected number, got " + type_name(v));
  }
  return v.get<double>();
}

inline long long get_integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError("key '" + where + key + "': expected integer, got " + type_name(v));
  }
  return v.get<long long>();
}

inline std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ConfigError("key '" + where + key + "': expected string, got " + type_name(v));
  }
  return v.get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ConfigError("key '" + where + key + "': expected boolean, got " + type_name(v));
  }
  return v.get<bool>();
}

inline TargetKind parse_target_kind(const std::string& s) {
  if (s == "sphere") return TargetKind::UnitSphere;
  if (s == "flat-torus") return TargetKind::FlatTorus;
  if (s == "ellipsoid") return TargetKind::Ellipsoid;
  throw ConfigError("key 'target': unknown target '" + s +
                    "' (expected sphere, flat-torus, or ellipsoid)");
}

inline std::string target_name(TargetKind k) {
  switch (k) {
    case TargetKind::UnitSphere: return "sphere";
    case TargetKind::FlatTorus: return "flat-torus";
    case TargetKind::Ellipsoid: return "ellipsoid";
  }
  return "sphere";
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  if (cfg.n < 8 || cfg.n % 2 != 0) throw ConfigError("key 'n': must be an even integer >= 8");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("key 't_end': must be >= 0");
  if (cfg.k < 2) throw ConfigError("key 'k': must be >= 2");
  if (cfg.snap_every < 1) throw ConfigError("key 'snap_every': must be >= 1");
  if (cfg.diag_every < 1) throw ConfigError("key 'diag_every': must be >= 1");
  if (cfg.stepper.dt && !(*cfg.stepper.dt > 0.0)) throw ConfigError("key 'dt': must be > 0");
  if (!(cfg.stepper.safety > 0.0 && cfg.stepper.safety <= 1.0)) {
    throw ConfigError("key 'safety': must lie in (0, 1]");
  }
  if (cfg.stepper.renormalize_every < 1) throw ConfigError("key 'renormalize_every': must be >= 1");
  if (!(cfg.params.epsilon >= 0.0 && cfg.params.epsilon <= 1.0)) {
    throw ConfigError("key 'epsilon': must lie in [0, 1]");
  }
  if (cfg.params.a == 0.0 && cfg.preset != "schrodinger-map") {
    throw ConfigError("key 'params.a': a = 0 is only allowed with preset 'schrodinger-map'");
  }
  if (cfg.preset && !is_preset_name(*cfg.preset)) {
    throw ConfigError("key 'preset': unknown preset '" + *cfg.preset + "'");
  }
  if (cfg.initial.kind == InitialKind::Latitude &&
      !(cfg.initial.radius > 0.0 && cfg.initial.radius <= 1.0)) {
    throw ConfigError("key 'initial_params.r': must lie in (0, 1]");
  }
  if (cfg.target.kind == TargetKind::Ellipsoid) {
    for (double v : cfg.target.axes) {
      if (!(v > 0.0)) throw ConfigError("key 'axes': semi-axes must be > 0");
    }
  }
  resolve_rhs(cfg);
}

inline RunConfig config_from_json(const nlohmann::json& root) {
  using detail::get_bool;
  using detail::get_integer;
  using detail::get_number;
  using detail::get_string;
  if (!root.is_object()) throw ConfigError("config root: expected object");
  detail::reject_unknown(root,
                         {"target", "axes", "initial", "initial_params", "preset", "params",
                          "epsilon", "n", "dt", "safety", "scheme", "rhs", "renormalize_every",
                          "dealias", "t_end", "snap_every", "diag_every", "k", "compensated_sum",
                          "output_dir"},
                         "");
  for (const char* required : {"target", "initial", "n", "t_end"}) {
    if (!root.contains(required)) throw ConfigError(std::string("missing key '") + required + "'");
  }
  if (!root.contains("preset") && !root.contains("params")) {
    throw ConfigError("missing key 'preset' (or explicit 'params')");
  }

  RunConfig cfg;
  cfg.target.kind = detail::parse_target_kind(get_string(root, "target", ""));
  if (root.contains("axes")) {
    const auto& axes = root.at("axes");
    if (!axes.is_array() || axes.size() != 3) throw ConfigError("key 'axes': expected array of 3 numbers");
    for (int i = 0; i < 3; ++i) {
      if (!axes[i].is_number()) throw ConfigError("key 'axes': expected array of 3 numbers");
      cfg.target.axes[i] = axes[i].get<double>();
    }
  }

  try {
    cfg.initial.kind = parse_initial_kind(get_string(root, "initial", ""));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("key 'initial': ") + e.what());
  }
  if (root.contains("initial_params")) {
    const auto& ip = root.at("initial_params");
    if (!ip.is_object()) throw ConfigError("key 'initial_params': expected object, got " + detail::type_name(ip));
    detail::reject_unknown(ip, {"r", "mode", "amplitude", "max_mode", "seed"}, "initial_params.");
    const std::string w = "initial_params.";
    if (ip.contains("r")) cfg.initial.radius = get_number(ip, "r", w);
    if (ip.contains("mode")) cfg.initial.mode = static_cast<int>(get_integer(ip, "mode", w));
    if (ip.contains("amplitude")) cfg.initial.amplitude = get_number(ip, "amplitude", w);
    if (ip.contains("max_mode")) cfg.initial.max_mode = static_cast<int>(get_integer(ip, "max_mode", w));
    if (ip.contains("seed")) {
      const long long seed = get_integer(ip, "seed", w);
      if (seed < 0) throw ConfigError("key 'initial_params.seed': must be >= 0");
      cfg.initial.seed = static_cast<std::uint64_t>(seed);
    }
  }

  if (root.contains("preset")) {
    cfg.preset = get_string(root, "preset", "");
    if (!is_preset_name(*cfg.preset)) throw ConfigError("key 'preset': unknown preset '" + *cfg.preset + "'");
    cfg.params = preset(*cfg.preset);
  }
  if (root.contains("params")) {
    const auto& p = root.at("params");
    if (!p.is_object()) throw ConfigError("key 'params': expected object, got " + detail::type_name(p));
    detail::reject_unknown(p, {"a", "b", "c", "lambda"}, "params.");
    if (!cfg.preset) {
      for (const char* key : {"a", "b", "c", "lambda"}) {
        if (!p.contains(key)) throw ConfigError(std::string("missing key 'params.") + key + "'");
      }
    }
    if (p.contains("a")) cfg.params.a = get_number(p, "a", "params.");
    if (p.contains("b")) cfg.params.b = get_number(p, "b", "params.");
    if (p.contains("c")) cfg.params.c = get_number(p, "c", "params.");
    if (p.contains("lambda")) cfg.params.lambda = get_number(p, "lambda", "params.");
  }
  if (root.contains("epsilon")) cfg.params.epsilon = get_number(root, "epsilon", "");

  const long long n = get_integer(root, "n", "");
  cfg.n = static_cast<int>(n);
  cfg.t_end = get_number(root, "t_end", "");
  if (root.contains("dt") && !root.at("dt").is_null()) cfg.stepper.dt = get_number(root, "dt", "");
  if (root.contains("safety")) cfg.stepper.safety = get_number(root, "safety", "");
  if (root.contains("scheme")) {
    const std::string s = get_string(root, "scheme", "");
    if (s == "rk4") cfg.stepper.scheme = Scheme::Rk4;
    else if (s == "rk4-projected") cfg.stepper.scheme = Scheme::Rk4Projected;
    else throw ConfigError("key 'scheme': unknown scheme '" + s + "' (expected rk4 or rk4-projected)");
  }
  if (root.contains("rhs")) {
    const std::string s = get_string(root, "rhs", "");
    if (s == "auto") cfg.rhs = RhsChoice::Auto;
    else if (s == "intrinsic") cfg.rhs = RhsChoice::Intrinsic;
    else if (s == "extrinsic") cfg.rhs = RhsChoice::Extrinsic;
    else throw ConfigError("key 'rhs': unknown value '" + s + "' (expected auto, intrinsic, or extrinsic)");
  }
  if (root.contains("renormalize_every")) {
    cfg.stepper.renormalize_every = static_cast<int>(get_integer(root, "renormalize_every", ""));
  }
  if (root.contains("dealias")) cfg.stepper.dealias = get_bool(root, "dealias", "");
  if (root.contains("snap_every")) cfg.snap_every = static_cast<int>(get_integer(root, "snap_every", ""));
  if (root.contains("diag_every")) cfg.diag_every = static_cast<int>(get_integer(root, "diag_every", ""));
  if (root.contains("k")) cfg.k = static_cast<int>(get_integer(root, "k", ""));
  if (root.contains("compensated_sum")) cfg.compensated_sum = get_bool(root, "compensated_sum", "");
  if (root.contains("output_dir")) cfg.output_dir = get_string(root, "output_dir", "");

  validate(cfg);
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(root);
}

/// Fully defaulted canonical form; parse_config(serialize) reproduces cfg.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["target"] = detail::target_name(cfg.target.kind);
  j["axes"] = cfg.target.axes;
  j["initial"] = to_string(cfg.initial.kind);
  j["initial_params"] = {{"r", cfg.initial.radius},
                         {"mode", cfg.initial.mode},
                         {"amplitude", cfg.initial.amplitude},
                         {"max_mode", cfg.initial.max_mode},
                         {"seed", cfg.initial.seed}};
  if (cfg.preset) j["preset"] = *cfg.preset;
  j["params"] = {{"a", cfg.params.a}, {"b", cfg.params.b}, {"c", cfg.params.c},
                 {"lambda", cfg.params.lambda}};
  j["epsilon"] = cfg.params.epsilon;
  j["n"] = cfg.n;
  j["dt"] = cfg.stepper.dt ? nlohmann::json(*cfg.stepper.dt) : nlohmann::json(nullptr);
  j["safety"] = cfg.stepper.safety;
  j["scheme"] = to_string(cfg.stepper.scheme);
  j["rhs"] = to_string(cfg.rhs);
  j["renormalize_every"] = cfg.stepper.renormalize_every;
  j["dealias"] = cfg.stepper.dealias;
  j["t_end"] = cfg.t_end;
  j["snap_every"] = cfg.snap_every;
  j["diag_every"] = cfg.diag_every;
  j["k"] = cfg.k;
  j["compensated_sum"] = cfg.compensated_sum;
  j["output_dir"] = cfg.output_dir;
  return j;
}

inline std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

}  // namespace dispflow
