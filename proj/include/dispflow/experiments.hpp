// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file experiments.hpp
/// @brief Scripted numerical studies: temporal/spatial convergence on the
/// rotating latitude circle, the vanishing-regularization family, linear
/// response of the gauged difference energy, and the identity suite.
///
/// Hard checks are confined to algebraic identities and discretization
/// orders. Quantities tied to existence time or uniqueness constants are
/// reported in `fitted`, never asserted.

#include "dispflow/hash.hpp"
#include "dispflow/integrate.hpp"

#include <algorithm>
#include <atomic>
#include <complex>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <numeric>
#include <thread>

namespace dispflow {

using nlohmann::json;

struct StudyCheck {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in"
  double threshold = 0.0;
  double threshold_hi = 0.0;  // upper end for "in"
  bool pass = false;
};

struct StudyResult {
  std::string name;
  json parameters;
  std::vector<json> cases;  // one row per case, each carrying "config_hash"
  json fitted = json::object();
  std::vector<StudyCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const StudyCheck& c) { return c.pass; });
  }
};

inline StudyCheck check_at_most(std::string name, double value, double limit) {
  return {std::move(name), value, "<=", limit, 0.0, value <= limit};
}

inline StudyCheck check_at_least(std::string name, double value, double limit) {
  return {std::move(name), value, ">=", limit, 0.0, value >= limit};
}

inline StudyCheck check_within(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, "in", lo, hi, value >= lo && value <= hi};
}

inline std::string config_hash(const RunConfig& cfg) { return sha256_hex(serialize_config(cfg)); }

inline std::string json_hash(const json& j) { return sha256_hex(j.dump()); }

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results are
/// stored by index, so the output never depends on scheduling. The first
/// exception (lowest index) is rethrown after all workers finish.
template <class Fn>
auto parallel_map(std::size_t count, int jobs, Fn fn) {
  using R = std::invoke_result_t<Fn, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Convergence on the rotating latitude circle

/// Angular speed of the rotating latitude circle of radius r on the sphere:
/// u(t,x) = latitude(x + omega t), omega = h (a - lambda - (a+b) r^2), h = sqrt(1-r^2).
inline double latitude_speed(const FlowParams& p, double r) {
  const double h = std::sqrt(1.0 - r * r);
  return h * (p.a - p.lambda - (p.a + p.b) * r * r);
}

inline Curve exact_latitude(const Grid& grid, double r, double shift) {
  const double h = std::sqrt(1.0 - r * r);
  Curve c{grid, Points(grid.size(), 3)};
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.node(j) + shift;
    c.points.row(j) << r * std::cos(x), r * std::sin(x), h;
  }
  return c;
}

struct ConvergenceOptions {
  RunConfig base;                             // latitude on the sphere
  std::vector<double> dt_factors{1.0, 0.5, 0.25};  // multiples of dt0
  std::optional<double> dt0;                  // default: estimate_dt at base.n
  std::vector<int> n_list{16, 32, 64};        // spatial sweep at the finest dt of n_list.back()
  bool self_convergence = true;               // Richardson on a perturbed curve (reported)
  double self_t_end = 0.01;
  int jobs = 1;
};

inline RunConfig default_convergence_base() {
  RunConfig cfg;
  cfg.initial.kind = InitialKind::Latitude;
  cfg.initial.radius = 0.6;
  cfg.params = FlowParams{1.0, 0.0, 0.0, 1.0, 0.0, 1.0};
  cfg.n = 64;
  cfg.t_end = 0.05;
  cfg.snap_every = 1 << 30;
  cfg.diag_every = 1 << 30;
  return cfg;
}

inline StudyResult convergence_study(const ConvergenceOptions& opt) {
  const RunConfig& base = opt.base;
  if (base.initial.kind != InitialKind::Latitude || base.target.kind != TargetKind::UnitSphere) {
    throw std::invalid_argument("convergence_study needs a latitude circle on the sphere");
  }
  StudyResult res;
  res.name = "convergence";
  const FlowParams params = params_for_target(base.params, base.target);
  const double r = base.initial.radius;
  const double omega = latitude_speed(params, r);
  const double dt0 = opt.dt0 ? *opt.dt0 : estimate_dt(params, Grid::make(base.n), base.stepper.safety);
  res.parameters = {{"base", config_to_json(base)}, {"dt0", dt0},
                    {"dt_factors", opt.dt_factors}, {"n_list", opt.n_list},
                    {"omega", omega}, {"self_convergence", opt.self_convergence}};

  struct Case {
    std::string kind;
    RunConfig cfg;
  };
  std::vector<Case> cases;
  for (double f : opt.dt_factors) {
    RunConfig c = base;
    c.stepper.dt = dt0 * f;
    cases.push_back({"temporal", c});
  }
  const double dt_spatial =
      estimate_dt(params, Grid::make(*std::max_element(opt.n_list.begin(), opt.n_list.end())),
                  base.stepper.safety);
  for (int n : opt.n_list) {
    RunConfig c = base;
    c.n = n;
    c.stepper.dt = dt_spatial;
    cases.push_back({"spatial", c});
  }
  if (opt.self_convergence) {
    for (double f : opt.dt_factors) {
      RunConfig c = base;
      c.initial.kind = InitialKind::PerturbedGreatCircle;
      c.initial.mode = 3;
      c.initial.amplitude = 0.1;
      c.t_end = opt.self_t_end;
      c.stepper.dt = dt0 * f;
      cases.push_back({"self", c});
    }
  }

  struct Outcome {
    double error = 0.0;
    double dt = 0.0;
    long steps = 0;
    Points final_points;
  };
  const auto outcomes = parallel_map(cases.size(), opt.jobs, [&](std::size_t i) {
    const auto traj = run(cases[i].cfg);
    Outcome o;
    o.dt = traj.dt;
    o.steps = traj.steps;
    o.final_points = traj.final_state.curve.points;
    if (cases[i].kind != "self") {
      const Curve exact = exact_latitude(Grid::make(cases[i].cfg.n), r, omega * cases[i].cfg.t_end);
      o.error = sup_distance(traj.final_state.curve.points, exact.points);
    }
    return o;
  });

  std::vector<double> temporal_err, temporal_dt, spatial_err, self_diff;
  std::vector<const Points*> self_points;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    json row = {{"case", i}, {"kind", cases[i].kind}, {"config_hash", config_hash(cases[i].cfg)},
                {"n", cases[i].cfg.n}, {"dt", outcomes[i].dt}, {"steps", outcomes[i].steps}};
    if (cases[i].kind == "temporal") {
      temporal_err.push_back(outcomes[i].error);
      temporal_dt.push_back(outcomes[i].dt);
      row["sup_error"] = outcomes[i].error;
    } else if (cases[i].kind == "spatial") {
      spatial_err.push_back(outcomes[i].error);
      row["sup_error"] = outcomes[i].error;
    } else {
      self_points.push_back(&outcomes[i].final_points);
    }
    res.cases.push_back(std::move(row));
  }

  std::vector<double> ratios;
  for (std::size_t i = 0; i + 1 < temporal_err.size(); ++i) {
    ratios.push_back(temporal_err[i] / temporal_err[i + 1]);
  }
  std::vector<double> logdt, logerr;
  for (std::size_t i = 0; i < temporal_err.size(); ++i) {
    logdt.push_back(std::log(temporal_dt[i]));
    logerr.push_back(std::log(std::max(temporal_err[i], 1e-300)));
  }
  const double order = temporal_err.size() >= 2 ? fit_slope(logdt, logerr) : 0.0;
  res.fitted["temporal_error_ratios"] = ratios;
  res.fitted["temporal_order"] = order;
  res.fitted["spatial_errors"] = spatial_err;
  res.checks.push_back(check_within("temporal order on exact rotating latitude", order, 3.5, 4.5));
  if (!temporal_err.empty()) {
    res.checks.push_back(check_at_most("terminal sup error at finest dt", temporal_err.back(), 1e-6));
  }
  if (!spatial_err.empty()) {
    res.checks.push_back(
        check_at_most("spatial error at largest n (floor)", spatial_err.back(), 1e-10));
  }
  if (self_points.size() >= 3) {
    for (std::size_t i = 0; i + 1 < self_points.size(); ++i) {
      self_diff.push_back(sup_distance(*self_points[i], *self_points[i + 1]));
    }
    std::vector<double> self_orders;
    for (std::size_t i = 0; i + 1 < self_diff.size(); ++i) {
      self_orders.push_back(std::log(self_diff[i] / self_diff[i + 1]) /
                            std::log(opt.dt_factors[i] / opt.dt_factors[i + 1]));
    }
    res.fitted["self_convergence_differences"] = self_diff;
    res.fitted["self_convergence_orders"] = self_orders;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Vanishing regularization

struct EpsilonOptions {
  RunConfig base;
  std::vector<double> eps_list{1e-2, 1e-3, 1e-4, 0.0};
  int jobs = 1;
};

inline RunConfig default_epsilon_base() {
  RunConfig cfg;
  cfg.initial.kind = InitialKind::PerturbedGreatCircle;
  cfg.initial.mode = 3;
  cfg.initial.amplitude = 0.1;
  cfg.preset = "integrable";
  cfg.params = preset("integrable");
  cfg.rhs = RhsChoice::Intrinsic;
  cfg.n = 64;
  cfg.t_end = 0.02;
  cfg.snap_every = 1 << 30;
  cfg.diag_every = 1 << 30;
  return cfg;
}

inline StudyResult epsilon_study(const EpsilonOptions& opt) {
  const auto& eps = opt.eps_list;
  if (eps.size() < 2 || eps.back() != 0.0) {
    throw std::invalid_argument("epsilon list must have >= 2 entries and end with 0");
  }
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    if (!(eps[i] > eps[i + 1])) throw std::invalid_argument("epsilon list must be strictly decreasing");
  }
  StudyResult res;
  res.name = "epsilon";
  // One dt for every member of the family, set by the stiffest (largest eps).
  RunConfig stiff = opt.base;
  stiff.params.epsilon = eps.front();
  const double dt = opt.base.stepper.dt
                        ? *opt.base.stepper.dt
                        : estimate_dt(params_for_target(stiff.params, stiff.target),
                                      Grid::make(stiff.n), stiff.stepper.safety);
  res.parameters = {{"base", config_to_json(opt.base)}, {"eps_list", eps}, {"dt", dt}};

  std::vector<RunConfig> cfgs;
  for (double e : eps) {
    RunConfig c = opt.base;
    c.params.epsilon = e;
    c.stepper.dt = dt;
    if (c.rhs == RhsChoice::Extrinsic) c.rhs = RhsChoice::Intrinsic;
    cfgs.push_back(c);
  }
  const auto finals = parallel_map(cfgs.size(), opt.jobs, [&](std::size_t i) {
    return run(cfgs[i]).final_state.curve.points;
  });

  std::vector<double> dist;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) dist.push_back(sup_distance(finals[i], finals[i + 1]));
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    json row = {{"case", i}, {"epsilon", eps[i]}, {"config_hash", config_hash(cfgs[i])}};
    if (i + 1 < cfgs.size()) row["distance_to_next"] = dist[i];
    res.cases.push_back(std::move(row));
  }
  bool decreasing = true;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
    decreasing = decreasing && dist[i + 1] < dist[i];
    worst_ratio = std::max(worst_ratio, dist[i + 1] / dist[i]);
  }
  // Empirical rate in eps from the pairs with both members positive.
  std::vector<double> le, ld;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
    le.push_back(std::log(eps[i]));
    ld.push_back(std::log(dist[i]));
  }
  res.fitted["distances"] = dist;
  if (le.size() >= 2) res.fitted["empirical_rate"] = fit_slope(le, ld);
  res.checks.push_back({"distances strictly decreasing (max successive ratio)", worst_ratio, "<", 1.0,
                        0.0, decreasing});
  return res;
}

// ---------------------------------------------------------------------------
// Linear response of the gauged difference energy

struct StabilityOptions {
  RunConfig base;
  std::vector<double> deltas{1e-4, 5e-5, 1e-5};
  int perturbation_mode = 2;
  int samples = 40;  // D, D~ evaluated at this many evenly spaced times
  int jobs = 1;
};

inline RunConfig default_stability_base() {
  RunConfig cfg;
  cfg.initial.kind = InitialKind::PerturbedGreatCircle;
  cfg.initial.mode = 3;
  cfg.initial.amplitude = 0.1;
  cfg.preset = "anco-myrzakulov";
  cfg.params = preset("anco-myrzakulov");
  cfg.n = 64;
  cfg.t_end = 0.01;
  cfg.diag_every = 1 << 30;
  return cfg;
}

/// Base curve plus delta times a mode-m ambient perturbation, pulled back
/// onto the target.
inline Curve perturb_curve(const Target& target, const Curve& base, double delta, int mode) {
  if (delta == 0.0) return base;
  Curve out = base;
  for (int j = 0; j < base.grid.size(); ++j) {
    const double x = base.grid.node(j);
    const Vec3 dir(std::cos(mode * x), std::sin(mode * x), std::cos(mode * x));
    out.points.row(j) += delta * dir.transpose();
  }
  return renormalize(target, out).curve;
}

inline StudyResult stability_study(const StabilityOptions& opt) {
  if (opt.base.target.kind != TargetKind::UnitSphere) {
    throw std::invalid_argument("stability_study runs on the sphere");
  }
  StudyResult res;
  res.name = "stability";
  const Target target = opt.base.target.make();
  const FlowParams params = params_for_target(opt.base.params, opt.base.target);
  RunConfig cfg = opt.base;
  const auto [dt, steps] = plan_steps(cfg);
  cfg.stepper.dt = dt;
  cfg.snap_every = std::max<long>(1, steps / opt.samples);
  res.parameters = {{"base", config_to_json(cfg)}, {"deltas", opt.deltas},
                    {"perturbation_mode", opt.perturbation_mode}};

  const Curve base_curve = initial_curve(cfg);
  std::vector<double> all_deltas{0.0};
  all_deltas.insert(all_deltas.end(), opt.deltas.begin(), opt.deltas.end());
  const auto trajs = parallel_map(all_deltas.size() + 1, opt.jobs, [&](std::size_t i) {
    if (i == 0) return run_from(cfg, base_curve);
    return run_from(cfg, perturb_curve(target, base_curve, all_deltas[i - 1], opt.perturbation_mode));
  });
  const Trajectory& base_traj = trajs[0];

  const auto window_fit = [&](const std::vector<double>& t, const std::vector<double>& logd) {
    const double t_end = t.back();
    std::vector<double> wt, wl;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= 0.1 * t_end && t[i] <= 0.9 * t_end) {
        wt.push_back(t[i]);
        wl.push_back(logd[i]);
      }
    }
    return std::pair{fit_slope(wt, wl), wt.size()};
  };

  struct Series {
    double delta;
    std::vector<double> t, d, dg, logdg;
    double slope = 0.0;
    double gronwall_rate = 0.0;
  };
  std::vector<Series> series;
  double zero_delta_max = 0.0;
  double initial_consistency = 0.0;
  for (std::size_t i = 0; i < all_deltas.size(); ++i) {
    const Trajectory& tr = trajs[i + 1];
    Series s;
    s.delta = all_deltas[i];
    for (std::size_t m = 0; m < tr.snapshots.size(); ++m) {
      const Curve& u = base_traj.snapshots[m].curve;
      const Curve& v = tr.snapshots[m].curve;
      s.t.push_back(tr.snapshots[m].t);
      s.d.push_back(difference_energy(target, u, v));
      s.dg.push_back(gauged_difference_energy(target, u, v, params));
    }
    if (s.delta == 0.0) {
      zero_delta_max = *std::max_element(s.dg.begin(), s.dg.end());
    } else {
      const Curve direct = perturb_curve(target, base_curve, s.delta, opt.perturbation_mode);
      const double dg0 = gauged_difference_energy(target, base_curve, direct, params);
      initial_consistency = std::max(initial_consistency, std::abs(dg0 - s.dg[0]) / dg0);
      for (double v : s.dg) s.logdg.push_back(std::log(v));
      s.slope = window_fit(s.t, s.logdg).first;
      for (std::size_t m = 0; m + 1 < s.t.size(); ++m) {
        s.gronwall_rate = std::max(s.gronwall_rate, (s.logdg[m + 1] - s.logdg[m]) / (s.t[m + 1] - s.t[m]));
      }
    }
    json row = {{"case", i}, {"delta", s.delta}, {"config_hash", json_hash(json{{"config", config_to_json(cfg)}, {"delta", s.delta}, {"mode", opt.perturbation_mode}})},
                {"t", s.t}, {"D", s.d}, {"D_gauged", s.dg}};
    if (s.delta != 0.0) {
      row["log_slope"] = s.slope;
      row["gronwall_rate"] = s.gronwall_rate;
    }
    res.cases.push_back(std::move(row));
    series.push_back(std::move(s));
  }

  res.checks.push_back(check_at_most("D~ for identical data (delta = 0)", zero_delta_max, 1e-12));
  res.checks.push_back(check_at_most("D~(0) vs direct formula (relative)", initial_consistency, 1e-12));
  json pairs = json::array();
  // Reference is the first (largest) delta; each smaller one is compared to it.
  for (std::size_t i = 2; i < series.size(); ++i) {
    const Series& a = series[1];
    const Series& b = series[i];
    const double expected = std::log(a.delta / b.delta);
    double shift = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < a.t.size(); ++m) {
      if (a.t[m] >= 0.1 * a.t.back() && a.t[m] <= 0.9 * a.t.back()) {
        shift += a.logdg[m] - b.logdg[m];
        ++count;
      }
    }
    shift /= static_cast<double>(count);
    const double shift_rel = std::abs(shift - expected) / expected;
    const double slope_rel = std::abs(a.slope - b.slope) / std::max(std::abs(a.slope), std::abs(b.slope));
    const std::string tag = "delta " + json(a.delta).dump() + " vs " + json(b.delta).dump();
    res.checks.push_back(check_at_most("log D~ shift, " + tag + " (relative)", shift_rel, 0.1));
    res.checks.push_back(check_at_most("log D~ slope, " + tag + " (relative)", slope_rel, 0.1));
    pairs.push_back({{"delta_a", a.delta}, {"delta_b", b.delta}, {"shift", shift},
                     {"expected_shift", expected}, {"slope_a", a.slope}, {"slope_b", b.slope}});
  }
  double worst_rate = 0.0;
  bool finite_rates = true;
  for (std::size_t i = 1; i < series.size(); ++i) {
    worst_rate = std::max(worst_rate, series[i].gronwall_rate);
    finite_rates = finite_rates && std::isfinite(series[i].gronwall_rate);
  }
  res.checks.push_back({"finite Gronwall rate on the window", worst_rate, "<", 0.0, 0.0, finite_rates});
  res.checks.back().threshold = std::numeric_limits<double>::infinity();
  res.fitted["pairs"] = pairs;
  res.fitted["gronwall_rate_max"] = worst_rate;
  res.fitted["n4_doubling_time_base"] =
      base_traj.n4_doubling_time ? json(*base_traj.n4_doubling_time) : json(nullptr);
  return res;
}

// ---------------------------------------------------------------------------
// Identity suite

struct IdentityOptions {
  Target target = Target::unit_sphere();
  int seeds = 20;
  std::uint64_t base_seed = 1;
  int n = 64;
  /// The ellipsoid curvature along a curve is not band-limited, so the
  /// obstruction comparison runs on a finer grid.
  int obstruction_n = 128;
  std::uint64_t obstruction_seed = InitialSpec{}.seed;
  int jobs = 1;
};

namespace detail {

inline InitialSpec random_curve_spec(std::uint64_t seed, double amplitude = 0.1, int max_mode = 4) {
  InitialSpec s;
  s.kind = InitialKind::BandLimitedRandom;
  s.seed = seed;
  s.amplitude = amplitude;
  s.max_mode = max_mode;
  return s;
}

struct RoundoffResiduals {
  double two_dim = 0.0;
  double a1_sym = 0.0;
  double a2_sym = 0.0;
  double a1_sym_pointwise = 0.0;
  double a2_sym_pointwise = 0.0;
  double idempotence = 0.0;
  double j_skew = 0.0;
  double j_isometry = 0.0;
  double j_square = 0.0;
  double gauss_codazzi = 0.0;
};

inline RoundoffResiduals roundoff_residuals(const Target& target, const Curve& curve,
                                            std::uint64_t seed) {
  RoundoffResiduals r;
  const VectorField ux = velocity(target, curve);
  const VectorField jux = complex_structure(target, curve, ux);
  const VectorField y1 = random_tangent_field(target, curve, 4, seed * 7919 + 1);
  const VectorField y2 = random_tangent_field(target, curve, 4, seed * 7919 + 2);
  const VectorField y3 = random_tangent_field(target, curve, 4, seed * 7919 + 3);

  const VectorField lhs2d =
      scale(metric_inner(y1, ux), ux) + scale(metric_inner(y1, jux), jux);
  r.two_dim = sup_norm(lhs2d - scale(metric_inner(ux, ux), y1));

  for (auto kind : {FrameOperatorKind::A1, FrameOperatorKind::A2}) {
    const ScalarField g12 = metric_inner(frame_operator(kind, target, curve, y1), y2);
    const ScalarField g21 = metric_inner(y1, frame_operator(kind, target, curve, y2));
    const ScalarField diff{curve.grid, g12.values - g21.values};
    const double integral = std::abs(quadrature(diff));
    const double pointwise = sup_norm(diff);
    if (kind == FrameOperatorKind::A1) {
      r.a1_sym = integral;
      r.a1_sym_pointwise = pointwise;
    } else {
      r.a2_sym = integral;
      r.a2_sym_pointwise = pointwise;
    }
  }

  const VectorField ambient = random_ambient_field(curve.grid, 4, seed * 7919 + 4);
  const VectorField p1 = project_tangent(target, curve, ambient);
  r.idempotence = sup_norm(project_tangent(target, curve, p1) - p1);

  const VectorField jy = complex_structure(target, curve, y1);
  r.j_skew = sup_norm(metric_inner(jy, y1));
  r.j_isometry = sup_norm(ScalarField{curve.grid, metric_inner(jy, jy).values - metric_inner(y1, y1).values});
  r.j_square = sup_norm(complex_structure(target, curve, jy) + y1);

  if (target.has_constant_curvature()) {
    const double s = target.constant_curvature();
    for (int j = 0; j < curve.grid.size(); ++j) {
      const Vec3 p = curve.points.row(j).transpose();
      const Vec3 a = y1.values.row(j).transpose();
      const Vec3 b = y2.values.row(j).transpose();
      const Vec3 c = y3.values.row(j).transpose();
      const Vec3 emb = curvature_from_embedding(target, p, a, b, c);
      r.gauss_codazzi = std::max(r.gauss_codazzi, (emb - curvature_constant_form(s, a, b, c)).norm());
    }
  }
  return r;
}

/// sup|D(JY) - J(DY)| on a fixed smooth instance at grid size n.
inline double kaehler_defect(const Target& target, std::uint64_t seed, int n) {
  const Grid grid = Grid::make(n);
  const Curve curve = make_initial(random_curve_spec(seed), grid, target);
  const VectorField y = random_tangent_field(target, curve, 4, seed * 7919 + 5);
  const VectorField lhs = covariant_derivative(target, curve, complex_structure(target, curve, y), 1);
  const VectorField rhs = complex_structure(target, curve, covariant_derivative(target, curve, y, 1));
  return sup_norm(lhs - rhs);
}

/// Parameters used for the intrinsic/extrinsic comparison: every coefficient
/// nonzero so that each bracket term is exercised.
inline FlowParams equivalence_params() { return FlowParams{1.0, 0.7, -0.4, 1.3, 0.0, 1.0}; }

inline InitialSpec equivalence_curve_spec(std::uint64_t seed) {
  return random_curve_spec(seed, 0.02, 8);
}

inline double equivalence_defect(std::uint64_t seed, int n) {
  const Target sphere = Target::unit_sphere();
  const Curve curve = make_initial(equivalence_curve_spec(seed), Grid::make(n), sphere);
  const FlowParams p = equivalence_params();
  return sup_distance(rhs_intrinsic(p, sphere, curve).values,
                      rhs_extrinsic_sphere(p, sphere, curve).values);
}

}  // namespace detail

/// Obstruction integral computed independently of the spectral path: the
/// analytic initial loop is differentiated by complex step and integrated
/// with the midpoint rule on `points` nodes.
inline double obstruction_oracle(const Target& target, const InitialSpec& spec, int points) {
  const AmbientLoop loop(spec);
  const double h = 1e-20;
  const double dx = 2.0 * std::numbers::pi / points;
  using C = std::complex<double>;
  double sum = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = (j + 0.5) * dx;
    const auto uc = target.project_point(loop(C(x, h)));
    const auto ur = target.project_point(loop(x));
    const Vec3 u(ur[0], ur[1], ur[2]);
    const Vec3 ux(uc[0].imag() / h, uc[1].imag() / h, uc[2].imag() / h);
    // d/dx S(u(x)) by a second complex step, along the curve.
    const C sc = target.curvature(C(u.x(), h * ux.x()), C(u.y(), h * ux.y()), C(u.z(), h * ux.z()));
    sum += (sc.imag() / h) * ux.squaredNorm();
  }
  return sum * dx;
}

inline StudyResult identity_suite(const IdentityOptions& opt) {
  StudyResult res;
  res.name = "identities";
  res.parameters = {{"target", opt.target.name()}, {"seeds", opt.seeds},
                    {"base_seed", opt.base_seed}, {"n", opt.n},
                    {"obstruction_n", opt.obstruction_n}, {"obstruction_seed", opt.obstruction_seed}};
  const Grid grid = Grid::make(opt.n);

  const auto per_seed = parallel_map(static_cast<std::size_t>(opt.seeds), opt.jobs, [&](std::size_t i) {
    const std::uint64_t seed = opt.base_seed + i;
    const Curve curve = make_initial(detail::random_curve_spec(seed), grid, opt.target);
    return detail::roundoff_residuals(opt.target, curve, seed);
  });
  detail::RoundoffResiduals worst;
  for (std::size_t i = 0; i < per_seed.size(); ++i) {
    const auto& r = per_seed[i];
    res.cases.push_back({{"case", i}, {"kind", "roundoff"}, {"seed", opt.base_seed + i},
                         {"config_hash", json_hash({{"target", opt.target.name()}, {"n", opt.n}, {"seed", opt.base_seed + i}})},
                         {"two_dim", r.two_dim}, {"a1_sym", r.a1_sym}, {"a2_sym", r.a2_sym},
                         {"a1_sym_pointwise", r.a1_sym_pointwise}, {"a2_sym_pointwise", r.a2_sym_pointwise},
                         {"idempotence", r.idempotence}, {"j_skew", r.j_skew},
                         {"j_isometry", r.j_isometry}, {"j_square", r.j_square},
                         {"gauss_codazzi", r.gauss_codazzi}});
    worst.two_dim = std::max(worst.two_dim, r.two_dim);
    worst.a1_sym = std::max(worst.a1_sym, r.a1_sym);
    worst.a2_sym = std::max(worst.a2_sym, r.a2_sym);
    worst.idempotence = std::max(worst.idempotence, r.idempotence);
    worst.j_skew = std::max(worst.j_skew, r.j_skew);
    worst.j_isometry = std::max(worst.j_isometry, r.j_isometry);
    worst.j_square = std::max(worst.j_square, r.j_square);
    worst.gauss_codazzi = std::max(worst.gauss_codazzi, r.gauss_codazzi);
  }
  constexpr double roundoff = 1e-12;
  res.checks.push_back(check_at_most("two-dimensionality identity", worst.two_dim, roundoff));
  res.checks.push_back(check_at_most("A1 symmetry (quadrature)", worst.a1_sym, roundoff));
  res.checks.push_back(check_at_most("A2 symmetry (quadrature)", worst.a2_sym, roundoff));
  res.checks.push_back(check_at_most("projection idempotence", worst.idempotence, roundoff));
  res.checks.push_back(check_at_most("J skewness", worst.j_skew, roundoff));
  res.checks.push_back(check_at_most("J isometry", worst.j_isometry, roundoff));
  res.checks.push_back(check_at_most("J^2 = -1 on tangents", worst.j_square, roundoff));
  if (opt.target.has_constant_curvature()) {
    res.checks.push_back(check_at_most("Gauss-Codazzi vs constant-curvature form", worst.gauss_codazzi, roundoff));
  }

  // Spectral class: decay factor >= 100 from n = 32 to n = 128.
  if (opt.target.kind() == TargetKind::UnitSphere) {
    const double k32 = detail::kaehler_defect(opt.target, opt.base_seed, 32);
    const double k128 = detail::kaehler_defect(opt.target, opt.base_seed, 128);
    res.cases.push_back({{"case", res.cases.size()}, {"kind", "kaehler"}, {"config_hash", json_hash({{"kaehler", opt.base_seed}})},
                         {"defect_n32", k32}, {"defect_n128", k128}});
    res.checks.push_back(check_at_least("Kaehler commutation decay 32->128", k32 / k128, 100.0));

    const double e32 = detail::equivalence_defect(opt.base_seed, 32);
    const double e128 = detail::equivalence_defect(opt.base_seed, 128);
    res.cases.push_back({{"case", res.cases.size()}, {"kind", "equivalence"}, {"config_hash", json_hash({{"equivalence", opt.base_seed}})},
                         {"defect_n32", e32}, {"defect_n128", e128}});
    res.checks.push_back(check_at_least("intrinsic vs extrinsic decay 32->128", e32 / e128, 100.0));
    res.checks.push_back(check_at_most("intrinsic vs extrinsic at n=128", e128, 1e-8));
  }

  // Curvature obstruction on the three targets.
  const InitialSpec obstruction_spec = detail::random_curve_spec(opt.obstruction_seed);
  double constant_worst = 0.0;
  for (const Target& t : {Target::unit_sphere(), Target::flat_torus()}) {
    for (int i = 0; i < opt.seeds; ++i) {
      const Curve c = make_initial(detail::random_curve_spec(opt.base_seed + i), grid, t);
      constant_worst = std::max(constant_worst, std::abs(curvature_obstruction(t, c)));
    }
  }
  const Target ellipsoid = Target::ellipsoid(2.0, 1.0, 1.0);
  const double ell = curvature_obstruction(
      ellipsoid, make_initial(obstruction_spec, Grid::make(opt.obstruction_n), ellipsoid));
  const double ell_oracle = obstruction_oracle(ellipsoid, obstruction_spec, 4 * opt.obstruction_n);
  res.cases.push_back({{"case", res.cases.size()}, {"kind", "obstruction"},
                       {"config_hash", json_hash({{"obstruction", opt.obstruction_seed}, {"n", opt.obstruction_n}})},
                       {"constant_targets_max", constant_worst}, {"ellipsoid", ell},
                       {"ellipsoid_oracle", ell_oracle}});
  res.checks.push_back(check_at_most("obstruction on sphere and flat torus", constant_worst, roundoff));
  res.checks.push_back(check_at_least("|obstruction| on ellipsoid(2,1,1)", std::abs(ell), 1e-4));
  res.checks.push_back(check_at_most("ellipsoid obstruction vs 4x midpoint oracle (relative)",
                                     std::abs(ell - ell_oracle) / std::abs(ell_oracle), 1e-6));
  res.fitted["ellipsoid_obstruction"] = ell;
  return res;
}

}  // namespace dispflow
