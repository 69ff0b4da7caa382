// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file integrate.hpp
/// @brief Explicit projected RK4 with surface renormalization, and full runs.
///
/// The stiff part a J D^4 has a u-dependent J, so integrating-factor and
/// exponential schemes gain nothing; the step size scales like n^-4 instead.

#include "dispflow/config.hpp"
#include "dispflow/energy.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

namespace dispflow {

/// dt = safety / ((|a| + eps) kmax^4 + |lambda| kmax^2 + 1), kmax = n/2.
inline double estimate_dt(const FlowParams& p, const Grid& grid, double safety = 1.0) {
  if (p.a == 0.0 && p.b == 0.0 && p.c == 0.0 && p.lambda == 0.0 && p.epsilon == 0.0) {
    throw std::invalid_argument("estimate_dt: all flow coefficients are zero");
  }
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("estimate_dt: safety must lie in (0, 1]");
  const double kmax = grid.size() / 2.0;
  const double k2 = kmax * kmax;
  return safety / ((std::abs(p.a) + p.epsilon) * k2 * k2 + std::abs(p.lambda) * k2 + 1.0);
}

struct State {
  double t = 0.0;
  Curve curve;
  long step_count = 0;
  double renorm_total = 0.0;  // cumulative renormalization displacement
  double renorm_last = 0.0;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, State last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const State& last_good() const { return last_good_; }

 private:
  State last_good_;
};

struct StepOptions {
  Scheme scheme = Scheme::Rk4Projected;
  int renormalize_every = 1;
  bool dealias = false;
  /// Blow-up threshold on sup|u_x|; non-positive disables the check.
  double speed_limit = 0.0;
};

namespace detail {

inline Points slope(RhsKind kind, const FlowParams& params, const Target& target,
                    const Curve& at, Scheme scheme) {
  VectorField k = evaluate_rhs(kind, params, target, at);
  if (scheme == Scheme::Rk4Projected) k = project_tangent(target, at, k);
  return std::move(k.values);
}

inline bool all_finite(const Points& p) { return p.allFinite(); }

}  // namespace detail

/// One classical RK4 step on the ambient representation, followed by
/// renormalization onto the surface.
inline State step(const State& state, double dt, RhsKind kind, const Target& target,
                  const FlowParams& params, const StepOptions& opts = {}) {
  const Curve& u = state.curve;
  Curve stage{u.grid, Points()};

  const Points k1 = detail::slope(kind, params, target, u, opts.scheme);
  stage.points = u.points + (0.5 * dt) * k1;
  const Points k2 = detail::slope(kind, params, target, stage, opts.scheme);
  stage.points = u.points + (0.5 * dt) * k2;
  const Points k3 = detail::slope(kind, params, target, stage, opts.scheme);
  stage.points = u.points + dt * k3;
  const Points k4 = detail::slope(kind, params, target, stage, opts.scheme);

  State next;
  next.t = state.t + dt;
  next.step_count = state.step_count + 1;
  next.renorm_total = state.renorm_total;
  next.curve = Curve{u.grid, u.points + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};

  if (!detail::all_finite(next.curve.points)) {
    throw BlowUpError("non-finite values at t = " + std::to_string(next.t), state);
  }
  if (opts.dealias) {
    next.curve.points =
        truncate_modes(VectorField{u.grid, next.curve.points}, two_thirds_cutoff(u.grid)).values;
  }
  if (opts.renormalize_every > 0 && next.step_count % opts.renormalize_every == 0) {
    auto r = renormalize(target, next.curve);
    next.curve = std::move(r.curve);
    next.renorm_last = r.magnitude;
    next.renorm_total += r.magnitude;
  }
  if (opts.speed_limit > 0.0) {
    const double speed = sup_norm(spectral_derivative(VectorField{u.grid, next.curve.points}, 1));
    if (!(speed <= opts.speed_limit)) {
      throw BlowUpError("sup|u_x| exceeded blow-up threshold at t = " + std::to_string(next.t),
                        state);
    }
  }
  return next;
}

struct Snapshot {
  double t;
  Curve curve;
};

struct Trajectory {
  RunConfig config;
  RhsKind rhs = RhsKind::Extrinsic;
  double dt = 0.0;
  long steps = 0;
  std::vector<Snapshot> snapshots;
  std::vector<EnergyReport> diagnostics;
  State final_state;
  /// First diagnostic time with N_4(t) > 2 N_4(0), if any. Reported, never enforced.
  std::optional<double> n4_doubling_time;
  bool blew_up = false;
  std::string blowup_message;
};

class RunBlowUp : public std::runtime_error {
 public:
  RunBlowUp(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

inline StepOptions step_options(const RunConfig& cfg) {
  StepOptions o;
  o.scheme = cfg.stepper.scheme;
  o.renormalize_every = cfg.stepper.renormalize_every;
  o.dealias = cfg.stepper.dealias;
  return o;
}

/// Effective step: the requested (or estimated) dt shrunk so that an integer
/// number of steps lands exactly on t_end.
inline std::pair<double, long> plan_steps(const RunConfig& cfg) {
  const FlowParams params = params_for_target(cfg.params, cfg.target);
  const double dt_req = cfg.stepper.dt ? *cfg.stepper.dt
                                       : estimate_dt(params, Grid::make(cfg.n), cfg.stepper.safety);
  if (cfg.t_end == 0.0) return {dt_req, 0};
  const long steps = static_cast<long>(std::ceil(cfg.t_end / dt_req - 1e-9));
  return {cfg.t_end / steps, std::max(steps, 1L)};
}

inline Curve initial_curve(const RunConfig& cfg) {
  return make_initial(cfg.initial, Grid::make(cfg.n), cfg.target.make());
}

/// Integrates from a given initial curve (used by studies that perturb data).
inline Trajectory run_from(const RunConfig& cfg, const Curve& initial) {
  validate(cfg);
  const Target target = cfg.target.make();
  const FlowParams params = params_for_target(cfg.params, cfg.target);
  Trajectory traj;
  traj.config = cfg;
  traj.rhs = resolve_rhs(cfg);
  std::tie(traj.dt, traj.steps) = plan_steps(cfg);

  StepOptions opts = step_options(cfg);
  const double speed0 = sup_norm(spectral_derivative(VectorField{initial.grid, initial.points}, 1));
  opts.speed_limit = 1e6 * std::max(speed0, 1e-300);

  const bool track_n4 = params.a != 0.0 && target.has_constant_curvature();
  double n4_initial = 0.0;
  State state{0.0, initial, 0, 0.0, 0.0};

  const auto record_diag = [&](const State& s) {
    traj.diagnostics.push_back(energy_report(target, s.curve, cfg.k, params, s.t, s.renorm_total,
                                             cfg.compensated_sum ? Summation::Compensated
                                                                 : Summation::Plain));
    if (track_n4) {
      const double n4 = cfg.k == 4 ? traj.diagnostics.back().gauged_energy
                                   : gauged_energy_Nk(target, s.curve, 4, params);
      if (s.step_count == 0) n4_initial = n4;
      else if (!traj.n4_doubling_time && n4 > 2.0 * n4_initial) traj.n4_doubling_time = s.t;
    }
  };

  traj.snapshots.push_back({0.0, initial});
  record_diag(state);
  for (long i = 0; i < traj.steps; ++i) {
    try {
      state = step(state, traj.dt, traj.rhs, target, params, opts);
    } catch (const BlowUpError& e) {
      traj.final_state = e.last_good();
      traj.blew_up = true;
      traj.blowup_message = e.what();
      if (traj.snapshots.back().t != e.last_good().t) {
        traj.snapshots.push_back({e.last_good().t, e.last_good().curve});
      }
      throw RunBlowUp(e.what(), std::move(traj));
    }
    if (i + 1 == traj.steps) state.t = cfg.t_end;  // remove accumulated rounding in t
    const bool last = i + 1 == traj.steps;
    if (state.step_count % cfg.snap_every == 0 || last) traj.snapshots.push_back({state.t, state.curve});
    if (state.step_count % cfg.diag_every == 0 || last) record_diag(state);
  }
  traj.final_state = state;
  return traj;
}

inline Trajectory run(const RunConfig& cfg) { return run_from(cfg, initial_curve(cfg)); }

}  // namespace dispflow
