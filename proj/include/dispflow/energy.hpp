// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file energy.hpp
/// @brief Covariant Sobolev norms, gauged energies, and difference energies.
///
/// Norm convention: the squared quantity sum_l int g(D^l u_x, D^l u_x) dx is
/// what the analysis works with; every function here returns its square root.

#include "dispflow/flow.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace dispflow {

struct GaugeCoefficients {
  int k = 4;
  double c1 = 0.0;
  double c2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// c1 = aS + c, c2 = (k - 1/2) aS + (2k + 1) b + (k + 5/2) c, d1 = c1, d2 = c2 + d1.
inline GaugeCoefficients gauge_coefficients(const FlowParams& p, int k) {
  GaugeCoefficients g;
  g.k = k;
  const double as = p.a * p.curvature;
  g.c1 = as + p.c;
  g.c2 = (k - 0.5) * as + (2 * k + 1) * p.b + (k + 2.5) * p.c;
  g.d1 = g.c1;
  g.d2 = g.c2 + g.d1;
  return g;
}

struct DifferenceGaugeCoefficients {
  double e1 = 0.0;
  double e2 = 0.0;
};

/// e1 = aS + c, e2 = e1 + (aS + 6b + 7c) / 2.
inline DifferenceGaugeCoefficients difference_gauge_coefficients(const FlowParams& p) {
  const double as = p.a * p.curvature;
  DifferenceGaugeCoefficients e;
  e.e1 = as + p.c;
  e.e2 = e.e1 + (as + 6.0 * p.b + 7.0 * p.c) / 2.0;
  return e;
}

/// D^l u_x for l = 0..m.
inline std::vector<VectorField> covariant_ladder(const Target& target, const Curve& curve, int m) {
  std::vector<VectorField> ladder;
  ladder.reserve(m + 1);
  ladder.push_back(velocity(target, curve));
  for (int l = 1; l <= m; ++l) {
    ladder.push_back(covariant_derivative(target, curve, ladder.back(), 1));
  }
  return ladder;
}

inline double squared_l2(const VectorField& y, Summation mode = Summation::Plain) {
  return quadrature(metric_inner(y, y), mode);
}

inline double sobolev_norm(const Target& target, const Curve& curve, int m) {
  if (m < 0) throw std::invalid_argument("Sobolev level must be >= 0");
  double sum = 0.0;
  for (const auto& level : covariant_ladder(target, curve, m)) sum += squared_l2(level);
  return std::sqrt(sum);
}

namespace detail {

inline void require_dispersive(const FlowParams& p, const char* what) {
  if (p.a == 0.0) throw std::invalid_argument(std::string(what) + ": undefined for a = 0");
}

inline VectorField gauge_from_ladder(const Target& target, const Curve& curve,
                                     const std::vector<VectorField>& ladder, int k,
                                     const GaugeCoefficients& g, double a) {
  const VectorField& ux = ladder[0];
  const VectorField& low = ladder[k - 2];
  const VectorField jux = complex_structure(target, curve, ux);
  const ScalarField lambda1{curve.grid, (-g.d1 / (2.0 * a)) * metric_inner(low, jux).values};
  const ScalarField lambda2{curve.grid, (g.d2 / (8.0 * a)) * metric_inner(ux, ux).values};
  return ladder[k] + scale(lambda1, jux) + scale(lambda2, low);
}

}  // namespace detail

/// V_k = D^k u_x - (d1/2a) g(D^{k-2} u_x, J u_x) J u_x + (d2/8a) g(u_x,u_x) D^{k-2} u_x.
inline VectorField gauge_field(const Target& target, const Curve& curve, int k,
                               const GaugeCoefficients& g, double a) {
  if (k < 2) throw std::invalid_argument("gauge level k must be >= 2");
  if (a == 0.0) throw std::invalid_argument("gauge field: undefined for a = 0");
  return detail::gauge_from_ladder(target, curve, covariant_ladder(target, curve, k), k, g, a);
}

inline VectorField gauge_field_Vk(const Target& target, const Curve& curve, int k,
                                  const FlowParams& params) {
  detail::require_dispersive(params, "gauge_field_Vk");
  return gauge_field(target, curve, k, gauge_coefficients(params, k), params.a);
}

inline double gauged_energy_Nk(const Target& target, const Curve& curve, int k,
                               const FlowParams& params) {
  if (k < 2) throw std::invalid_argument("gauge level k must be >= 2");
  detail::require_dispersive(params, "gauged_energy_Nk");
  const auto ladder = covariant_ladder(target, curve, k);
  double sum = 0.0;
  for (int l = 0; l < k; ++l) sum += squared_l2(ladder[l]);
  const VectorField v = detail::gauge_from_ladder(target, curve, ladder, k,
                                                  gauge_coefficients(params, k), params.a);
  return std::sqrt(sum + squared_l2(v));
}

struct LengthEnergy {
  double energy;  // int g(u_x,u_x) dx
  double rate;    // analytic dE/dt along the flow
};

/// E = int |u_x|^2 and dE/dt = -2c int g(D u_x, u_x) g(J u_x, D u_x) dx.
/// The a-, b- and lambda-terms drop out after one integration by parts since
/// J commutes with D and is skew.
inline LengthEnergy length_energy_and_rate(const Target& target, const Curve& curve,
                                           const FlowParams& params) {
  if (!target.has_constant_curvature()) {
    throw std::invalid_argument("length_energy_and_rate requires a constant-curvature target");
  }
  const VectorField ux = velocity(target, curve);
  const VectorField dux = covariant_derivative(target, curve, ux, 1);
  const VectorField jux = complex_structure(target, curve, ux);
  const ScalarField integrand{curve.grid, metric_inner(dux, ux).values.cwiseProduct(
                                              metric_inner(jux, dux).values)};
  return {quadrature(metric_inner(ux, ux)), -2.0 * params.c * quadrature(integrand)};
}

namespace detail {

struct DifferenceParts {
  VectorField z;
  VectorField zx;
  VectorField w;
};

inline DifferenceParts difference_parts(const Target& target, const Curve& u, const Curve& v) {
  require_same_grid(u.grid, v.grid, "difference_energy");
  VectorField z{u.grid, u.points - v.points};
  VectorField zx = spectral_derivative(z, 1);
  VectorField wu = covariant_derivative(target, u, velocity(target, u), 1);
  VectorField wv = covariant_derivative(target, v, velocity(target, v), 1);
  return {std::move(z), std::move(zx), wu - wv};
}

}  // namespace detail

/// D^2 = |Z|^2 + |Z_x|^2 + |W|^2 with Z = U - V and W the difference of the
/// tangent-projected second derivatives.
inline double difference_energy(const Target& target, const Curve& u, const Curve& v) {
  const auto parts = detail::difference_parts(target, u, v);
  return std::sqrt(squared_l2(parts.z) + squared_l2(parts.zx) + squared_l2(parts.w));
}

inline double gauged_difference_energy(const Target& target, const Curve& u, const Curve& v,
                                       const DifferenceGaugeCoefficients& e, double a) {
  if (a == 0.0) throw std::invalid_argument("gauged_difference_energy: undefined for a = 0");
  const auto parts = detail::difference_parts(target, u, v);
  const VectorField ux = velocity(target, u);
  const VectorField jux = complex_structure(target, u, ux);
  const ScalarField s1{u.grid, (-e.e1 / (2.0 * a)) * metric_inner(parts.z, jux).values};
  const ScalarField s2{u.grid, (e.e2 / (8.0 * a)) * metric_inner(ux, ux).values};
  const VectorField gauged = parts.w + scale(s1, jux) + scale(s2, parts.z);
  return std::sqrt(squared_l2(parts.z) + squared_l2(parts.zx) + squared_l2(gauged));
}

inline double gauged_difference_energy(const Target& target, const Curve& u, const Curve& v,
                                       const FlowParams& params) {
  return gauged_difference_energy(target, u, v, difference_gauge_coefficients(params), params.a);
}

/// int d/dx{S(u)} g(u_x,u_x) dx, which vanishes on constant-curvature targets.
inline double curvature_obstruction(const Target& target, const Curve& curve) {
  ScalarField s{curve.grid, Eigen::VectorXd(curve.grid.size())};
  for (int j = 0; j < curve.grid.size(); ++j) {
    s.values(j) = target.curvature(Vec3(curve.points.row(j).transpose()));
  }
  const ScalarField ds = spectral_derivative(s, 1);
  const VectorField ux = velocity(target, curve);
  return quadrature({curve.grid, ds.values.cwiseProduct(metric_inner(ux, ux).values)});
}

struct EnergyReport {
  double t = 0.0;
  int k = 4;
  std::vector<double> level_norms;  // ||D^l u_x||_{L^2}, l = 0..k
  double gauged_energy = std::numeric_limits<double>::quiet_NaN();
  double length = 0.0;
  double obstruction = 0.0;
  double renorm_drift = 0.0;
};

/// Full diagnostic row. N_k is NaN where the gauge is undefined (a = 0 or a
/// target without constant curvature).
inline EnergyReport energy_report(const Target& target, const Curve& curve, int k,
                                  const FlowParams& params, double t, double renorm_drift,
                                  Summation mode = Summation::Plain) {
  EnergyReport r;
  r.t = t;
  r.k = k;
  r.renorm_drift = renorm_drift;
  const auto ladder = covariant_ladder(target, curve, k);
  std::vector<double> squares;
  for (const auto& level : ladder) {
    squares.push_back(squared_l2(level, mode));
    r.level_norms.push_back(std::sqrt(squares.back()));
  }
  r.length = squares[0];
  if (params.a != 0.0 && target.has_constant_curvature()) {
    FlowParams p = params;
    p.curvature = target.constant_curvature();
    double sum = 0.0;
    for (int l = 0; l < k; ++l) sum += squares[l];
    const VectorField v =
        detail::gauge_from_ladder(target, curve, ladder, k, gauge_coefficients(p, k), p.a);
    r.gauged_energy = std::sqrt(sum + squared_l2(v, mode));
  }
  r.obstruction = curvature_obstruction(target, curve);
  return r;
}

}  // namespace dispflow
