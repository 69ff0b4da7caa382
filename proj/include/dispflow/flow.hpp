// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file flow.hpp
/// @brief Right-hand sides of the fourth-order dispersive curve flow.
///
/// Intrinsic form (any target):
///   u_t = a J D^3 u_x + (lambda + b g(u_x,u_x)) J D u_x + c g(D u_x, u_x) J u_x
/// with D the covariant derivative along u. The parabolic regularization adds
/// -eps D^3 u_x. On the unit sphere the same flow has the extrinsic form
///   u_t = u x [a d^3 u_x + (lambda + (a+b)|u_x|^2) d u_x + (5a+c)(d u_x, u_x) u_x]
/// in plain ambient derivatives d = d/dx.

#include "dispflow/geometry.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dispflow {

struct FlowParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double curvature = 1.0;  // sectional curvature S of the target, when constant

  friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

struct Preset {
  std::string name;
  FlowParams params;
  std::string constraint;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"heisenberg-biquadratic", {1.0, 2.0, 1.0, 1.0, 0.0, 1.0}, "3a - 2b + c = 0, lambda = 1"},
      {"integrable", {1.0, 1.5, 0.0, 1.0, 0.0, 1.0}, "3a - 2b + c = 0, c = 0, lambda = 1"},
      {"anco-myrzakulov", {-1.0, -1.0, -0.5, 0.0, 0.0, 1.0}, "a = -1, b = -1, c = -1/2, lambda = 0"},
      {"schrodinger-map", {0.0, 0.0, 0.0, 1.0, 0.0, 1.0}, "a = b = c = 0, lambda = 1"},
  };
  return table;
}

inline FlowParams preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.params;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

inline bool is_preset_name(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return true;
  }
  return false;
}

enum class RhsKind { Intrinsic, Extrinsic, Regularized };

inline std::string to_string(RhsKind kind) {
  switch (kind) {
    case RhsKind::Intrinsic: return "intrinsic";
    case RhsKind::Extrinsic: return "extrinsic";
    case RhsKind::Regularized: return "regularized";
  }
  return "unknown";
}

namespace detail {

// Shared kernel for the intrinsic and regularized forms. The eps term is
// appended only when eps != 0, so eps = 0 reproduces the intrinsic value bit
// for bit.
inline VectorField covariant_rhs(const FlowParams& params, const Target& target,
                                 const Curve& curve) {
  const VectorField ux = velocity(target, curve);
  const VectorField d1 = covariant_derivative(target, curve, ux, 1);
  const VectorField d2 = covariant_derivative(target, curve, d1, 1);
  const VectorField d3 = covariant_derivative(target, curve, d2, 1);

  const ScalarField speed2 = metric_inner(ux, ux);
  const ScalarField stretch = metric_inner(d1, ux);
  ScalarField coeff_d1{curve.grid, params.lambda + params.b * speed2.values.array()};
  ScalarField coeff_ux{curve.grid, params.c * stretch.values};

  VectorField out = params.a * complex_structure(target, curve, d3);
  out.values += scale(coeff_d1, complex_structure(target, curve, d1)).values;
  out.values += scale(coeff_ux, complex_structure(target, curve, ux)).values;
  if (params.epsilon != 0.0) out.values -= params.epsilon * d3.values;
  return out;
}

}  // namespace detail

inline VectorField rhs_intrinsic(const FlowParams& params, const Target& target,
                                 const Curve& curve) {
  FlowParams p = params;
  p.epsilon = 0.0;
  return detail::covariant_rhs(p, target, curve);
}

inline VectorField rhs_regularized(const FlowParams& params, const Target& target,
                                   const Curve& curve) {
  if (!(params.epsilon >= 0.0 && params.epsilon <= 1.0)) {
    throw std::invalid_argument("regularization parameter must lie in [0, 1]");
  }
  return detail::covariant_rhs(params, target, curve);
}

inline VectorField rhs_extrinsic_sphere(const FlowParams& params, const Target& target,
                                        const Curve& curve) {
  if (target.kind() != TargetKind::UnitSphere) {
    throw std::invalid_argument("extrinsic right-hand side is only defined on the unit sphere");
  }
  const auto d = spectral_derivatives(VectorField{curve.grid, curve.points}, {1, 2, 4});
  const VectorField& ux = d[0];
  const VectorField& dux = d[1];
  const VectorField& d3ux = d[2];

  const ScalarField speed2 = metric_inner(ux, ux);
  const ScalarField stretch = metric_inner(dux, ux);
  const Eigen::ArrayXd coeff_dux = params.lambda + (params.a + params.b) * speed2.values.array();
  const Eigen::ArrayXd coeff_ux = (5.0 * params.a + params.c) * stretch.values.array();

  Points bracket = params.a * d3ux.values;
  bracket += (dux.values.array().colwise() * coeff_dux).matrix();
  bracket += (ux.values.array().colwise() * coeff_ux).matrix();

  VectorField out{curve.grid, Points(curve.points.rows(), 3)};
  for (Eigen::Index j = 0; j < curve.points.rows(); ++j) {
    const Vec3 u = curve.points.row(j).transpose();
    const Vec3 v = bracket.row(j).transpose();
    out.values.row(j) = u.cross(v).transpose();
  }
  return out;
}

inline VectorField evaluate_rhs(RhsKind kind, const FlowParams& params, const Target& target,
                                const Curve& curve) {
  switch (kind) {
    case RhsKind::Intrinsic: return rhs_intrinsic(params, target, curve);
    case RhsKind::Extrinsic: return rhs_extrinsic_sphere(params, target, curve);
    case RhsKind::Regularized: return rhs_regularized(params, target, curve);
  }
  throw std::invalid_argument("unknown rhs kind");
}

/// Flow parameters with every coefficient negated: the flow they generate is
/// the time reversal of the original one.
inline FlowParams time_reversed(FlowParams p) {
  p.a = -p.a;
  p.b = -p.b;
  p.c = -p.c;
  p.lambda = -p.lambda;
  return p;
}

}  // namespace dispflow
