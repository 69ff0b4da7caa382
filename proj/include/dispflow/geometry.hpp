// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file geometry.hpp
/// @brief Target surfaces embedded in R^3 and the extrinsic calculus on them.
///
/// Every target is handled through its isometric embedding: tangent vectors
/// are ambient vectors orthogonal to the unit normal, the covariant derivative
/// along a curve is the tangent projection of the ambient derivative, and the
/// complex structure is the quarter turn Y -> nu x Y about the outward normal.
/// The flat torus is represented through its universal cover, the plane z = 0.

#include "dispflow/grid.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace dispflow {

enum class TargetKind { UnitSphere, FlatTorus, Ellipsoid };

class Target {
 public:
  static Target unit_sphere() { return Target(TargetKind::UnitSphere, {1.0, 1.0, 1.0}); }
  static Target flat_torus() { return Target(TargetKind::FlatTorus, {1.0, 1.0, 1.0}); }
  static Target ellipsoid(double p, double q, double r) {
    if (!(p > 0.0) || !(q > 0.0) || !(r > 0.0)) {
      throw std::invalid_argument("ellipsoid semi-axes must be strictly positive");
    }
    return Target(TargetKind::Ellipsoid, {p, q, r});
  }

  TargetKind kind() const { return kind_; }
  const std::array<double, 3>& semi_axes() const { return axes_; }

  std::string name() const {
    switch (kind_) {
      case TargetKind::UnitSphere: return "sphere";
      case TargetKind::FlatTorus: return "flat-torus";
      case TargetKind::Ellipsoid: return "ellipsoid";
    }
    return "unknown";
  }

  bool has_constant_curvature() const { return kind_ != TargetKind::Ellipsoid; }

  double constant_curvature() const {
    switch (kind_) {
      case TargetKind::UnitSphere: return 1.0;
      case TargetKind::FlatTorus: return 0.0;
      case TargetKind::Ellipsoid: break;
    }
    throw std::invalid_argument("ellipsoid has no constant sectional curvature");
  }

  /// Defining function: zero on the surface.
  template <class T>
  T level_set(const T& x, const T& y, const T& z) const {
    switch (kind_) {
      case TargetKind::UnitSphere: return x * x + y * y + z * z - T(1.0);
      case TargetKind::FlatTorus: return z;
      case TargetKind::Ellipsoid:
        return x * x / (axes_[0] * axes_[0]) + y * y / (axes_[1] * axes_[1]) +
               z * z / (axes_[2] * axes_[2]) - T(1.0);
    }
    return T(0.0);
  }

  double level_set(const Vec3& p) const { return level_set(p.x(), p.y(), p.z()); }

  /// Distance-like residual of the surface constraint.
  double constraint_residual(const Vec3& p) const {
    switch (kind_) {
      case TargetKind::UnitSphere: return std::abs(p.norm() - 1.0);
      case TargetKind::FlatTorus: return std::abs(p.z());
      case TargetKind::Ellipsoid: return std::abs(level_set(p));
    }
    return 0.0;
  }

  /// Gaussian curvature at an ambient point assumed to lie on the surface.
  /// Templated so that complex-step differentiation can pass through it.
  template <class T>
  T curvature(const T& x, const T& y, const T& z) const {
    switch (kind_) {
      case TargetKind::UnitSphere: return T(1.0);
      case TargetKind::FlatTorus: return T(0.0);
      case TargetKind::Ellipsoid: {
        const double p2 = axes_[0] * axes_[0];
        const double q2 = axes_[1] * axes_[1];
        const double r2 = axes_[2] * axes_[2];
        const T s = x * x / (p2 * p2) + y * y / (q2 * q2) + z * z / (r2 * r2);
        return T(1.0) / (p2 * q2 * r2 * s * s);
      }
    }
    return T(0.0);
  }

  double curvature(const Vec3& p) const { return curvature(p.x(), p.y(), p.z()); }

  Vec3 unit_normal(const Vec3& p) const {
    switch (kind_) {
      case TargetKind::UnitSphere: return p / p.norm();
      case TargetKind::FlatTorus: return Vec3::UnitZ();
      case TargetKind::Ellipsoid: {
        const Vec3 grad(p.x() / (axes_[0] * axes_[0]), p.y() / (axes_[1] * axes_[1]),
                        p.z() / (axes_[2] * axes_[2]));
        return grad / grad.norm();
      }
    }
    return Vec3::UnitZ();
  }

  /// Jacobian of the unit normal field (the Weingarten map, extended to R^3).
  Eigen::Matrix3d normal_jacobian(const Vec3& p) const {
    const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
    switch (kind_) {
      case TargetKind::UnitSphere: {
        const Vec3 nu = p / p.norm();
        return (eye - nu * nu.transpose()) / p.norm();
      }
      case TargetKind::FlatTorus: return Eigen::Matrix3d::Zero();
      case TargetKind::Ellipsoid: {
        const Vec3 inv(1.0 / (axes_[0] * axes_[0]), 1.0 / (axes_[1] * axes_[1]),
                       1.0 / (axes_[2] * axes_[2]));
        const Vec3 grad = p.cwiseProduct(inv);
        const Vec3 nu = grad / grad.norm();
        return (eye - nu * nu.transpose()) * inv.asDiagonal() / grad.norm();
      }
    }
    return Eigen::Matrix3d::Zero();
  }

  /// Pulls an ambient point back onto the surface along the ray from the
  /// origin (sphere, ellipsoid) or by dropping z (flat torus).
  template <class T>
  std::array<T, 3> project_point(const std::array<T, 3>& p) const {
    switch (kind_) {
      case TargetKind::UnitSphere: {
        const T s = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        return {p[0] / s, p[1] / s, p[2] / s};
      }
      case TargetKind::FlatTorus: return {p[0], p[1], T(0.0)};
      case TargetKind::Ellipsoid: {
        const T s = std::sqrt(level_set(p[0], p[1], p[2]) + T(1.0));
        return {p[0] / s, p[1] / s, p[2] / s};
      }
    }
    return p;
  }

  Vec3 project_point(const Vec3& p) const {
    const auto q = project_point(std::array<double, 3>{p.x(), p.y(), p.z()});
    return {q[0], q[1], q[2]};
  }

 private:
  Target(TargetKind kind, std::array<double, 3> axes) : kind_(kind), axes_(axes) {}

  TargetKind kind_;
  std::array<double, 3> axes_;
};

struct Curve {
  Grid grid;
  Points points;
};

/// Largest constraint residual over the nodes.
inline double constraint_residual(const Target& target, const Curve& curve) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < curve.points.rows(); ++j) {
    worst = std::max(worst, target.constraint_residual(curve.points.row(j).transpose()));
  }
  return worst;
}

struct Renormalized {
  Curve curve;
  double magnitude;  // sup over nodes of the displacement
};

inline Renormalized renormalize(const Target& target, const Curve& curve) {
  Renormalized out{curve, 0.0};
  for (Eigen::Index j = 0; j < curve.points.rows(); ++j) {
    const Vec3 p = curve.points.row(j).transpose();
    const Vec3 q = target.project_point(p);
    out.curve.points.row(j) = q.transpose();
    out.magnitude = std::max(out.magnitude, (q - p).norm());
  }
  return out;
}

inline VectorField project_tangent(const Target& target, const Curve& curve,
                                   const VectorField& y) {
  require_same_grid(curve.grid, y.grid, "project_tangent");
  VectorField out{y.grid, Points(y.values.rows(), 3)};
  for (Eigen::Index j = 0; j < y.values.rows(); ++j) {
    const Vec3 nu = target.unit_normal(curve.points.row(j).transpose());
    const Vec3 v = y.values.row(j).transpose();
    out.values.row(j) = (v - v.dot(nu) * nu).transpose();
  }
  return out;
}

inline VectorField complex_structure(const Target& target, const Curve& curve,
                                     const VectorField& y) {
  require_same_grid(curve.grid, y.grid, "complex_structure");
  VectorField out{y.grid, Points(y.values.rows(), 3)};
  for (Eigen::Index j = 0; j < y.values.rows(); ++j) {
    const Vec3 nu = target.unit_normal(curve.points.row(j).transpose());
    const Vec3 v = y.values.row(j).transpose();
    out.values.row(j) = nu.cross(v).transpose();
  }
  return out;
}

/// m-fold covariant derivative: each application is project(d/dx).
inline VectorField covariant_derivative(const Target& target, const Curve& curve,
                                        const VectorField& y, int order = 1) {
  if (order < 1) {
    throw std::invalid_argument("covariant derivative order must be >= 1, got " +
                                std::to_string(order));
  }
  VectorField out = y;
  for (int i = 0; i < order; ++i) {
    out = project_tangent(target, curve, spectral_derivative(out, 1));
  }
  return out;
}

/// u_x as a tangent field along the curve.
inline VectorField velocity(const Target& target, const Curve& curve) {
  return project_tangent(target, curve, spectral_derivative(VectorField{curve.grid, curve.points}, 1));
}

inline double sectional_curvature(const Target& target, const Vec3& point) {
  if (target.constraint_residual(point) > 1e-8) {
    throw std::invalid_argument("sectional_curvature: point is off the " + target.name() +
                                " surface");
  }
  return target.curvature(point);
}

inline ScalarField metric_inner(const VectorField& y1, const VectorField& y2) {
  require_same_grid(y1.grid, y2.grid, "metric_inner");
  return {y1.grid, (y1.values.cwiseProduct(y2.values)).rowwise().sum()};
}

/// Pointwise product of a scalar field and a vector field.
inline VectorField scale(const ScalarField& s, const VectorField& y) {
  require_same_grid(s.grid, y.grid, "scale");
  return {y.grid, y.values.array().colwise() * s.values.array()};
}

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  return {a.grid, a.values + b.values};
}

inline VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  return {a.grid, a.values - b.values};
}

inline VectorField operator*(double s, const VectorField& a) { return {a.grid, s * a.values}; }

enum class FrameOperatorKind { A1, A2, P1, P2 };

inline FrameOperatorKind parse_frame_operator(std::string_view name) {
  if (name == "A1") return FrameOperatorKind::A1;
  if (name == "A2") return FrameOperatorKind::A2;
  if (name == "P1") return FrameOperatorKind::P1;
  if (name == "P2") return FrameOperatorKind::P2;
  throw std::invalid_argument("unknown frame operator '" + std::string(name) + "'");
}

/// Pointwise frame operators built from u_x, its covariant derivative, and J:
///   A1 Y = g(Y,Du)Ju + g(Y,u)JDu + g(Y,JDu)u + g(Y,Ju)Du
///   A2 Y = g(Y,Ju)Du - g(Y,JDu)u
///   P1 Y = g(Y,u)Ju,   P2 Y = g(Du,u)JY
/// where u stands for u_x and D for the covariant derivative.
inline VectorField frame_operator(FrameOperatorKind kind, const Target& target,
                                  const Curve& curve, const VectorField& y) {
  const VectorField ux = velocity(target, curve);
  const VectorField dux = covariant_derivative(target, curve, ux, 1);
  const VectorField jux = complex_structure(target, curve, ux);
  switch (kind) {
    case FrameOperatorKind::A1: {
      const VectorField jdux = complex_structure(target, curve, dux);
      return scale(metric_inner(y, dux), jux) + scale(metric_inner(y, ux), jdux) +
             scale(metric_inner(y, jdux), ux) + scale(metric_inner(y, jux), dux);
    }
    case FrameOperatorKind::A2: {
      const VectorField jdux = complex_structure(target, curve, dux);
      return scale(metric_inner(y, jux), dux) - scale(metric_inner(y, jdux), ux);
    }
    case FrameOperatorKind::P1: return scale(metric_inner(y, ux), jux);
    case FrameOperatorKind::P2:
      return scale(metric_inner(dux, ux), complex_structure(target, curve, y));
  }
  throw std::invalid_argument("unknown frame operator");
}

/// Curvature tensor R(Y1,Y2)Y3 from the second fundamental form of the
/// embedding (single unit normal, D its Jacobian):
///   (Y3, D Y2) P D Y1 - (Y3, D Y1) P D Y2.
inline Vec3 curvature_from_embedding(const Target& target, const Vec3& point, const Vec3& y1,
                                     const Vec3& y2, const Vec3& y3) {
  const Eigen::Matrix3d d = target.normal_jacobian(point);
  const Vec3 nu = target.unit_normal(point);
  const auto tangent = [&](const Vec3& v) -> Vec3 { return v - v.dot(nu) * nu; };
  const Vec3 dy1 = d * y1;
  const Vec3 dy2 = d * y2;
  return y3.dot(dy2) * tangent(dy1) - y3.dot(dy1) * tangent(dy2);
}

/// The same tensor on a surface of constant curvature s.
inline Vec3 curvature_constant_form(double s, const Vec3& y1, const Vec3& y2, const Vec3& y3) {
  return s * (y3.dot(y2) * y1 - y3.dot(y1) * y2);
}

// ---------------------------------------------------------------------------
// Initial data

enum class InitialKind { GreatCircle, Latitude, PerturbedGreatCircle, BandLimitedRandom };

struct InitialSpec {
  InitialKind kind = InitialKind::GreatCircle;
  double radius = 0.6;      // latitude
  int mode = 3;             // perturbed-great-circle
  double amplitude = 0.1;   // perturbed-great-circle, band-limited-random
  int max_mode = 4;         // band-limited-random
  std::uint64_t seed = 7;   // band-limited-random

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

inline std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::GreatCircle: return "great-circle";
    case InitialKind::Latitude: return "latitude";
    case InitialKind::PerturbedGreatCircle: return "perturbed-great-circle";
    case InitialKind::BandLimitedRandom: return "band-limited-random";
  }
  return "unknown";
}

inline InitialKind parse_initial_kind(std::string_view name) {
  if (name == "great-circle") return InitialKind::GreatCircle;
  if (name == "latitude") return InitialKind::Latitude;
  if (name == "perturbed-great-circle") return InitialKind::PerturbedGreatCircle;
  if (name == "band-limited-random") return InitialKind::BandLimitedRandom;
  throw std::invalid_argument("unknown initial curve kind '" + std::string(name) + "'");
}

/// Uniform double in [-1, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
inline double unit_symmetric(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

/// Closed ambient loop before it is pulled onto the target, evaluable at any
/// (possibly complex) parameter value.
class AmbientLoop {
 public:
  explicit AmbientLoop(const InitialSpec& spec) : spec_(spec) {
    if (spec.kind == InitialKind::Latitude && !(spec.radius > 0.0 && spec.radius <= 1.0)) {
      throw std::invalid_argument("latitude radius must lie in (0, 1]");
    }
    if (spec.kind == InitialKind::BandLimitedRandom) {
      if (spec.max_mode < 1) throw std::invalid_argument("max_mode must be >= 1");
      std::mt19937_64 rng(spec.seed);
      coeffs_.resize(spec.max_mode);
      for (auto& c : coeffs_) {
        for (double& v : c) v = unit_symmetric(rng);
      }
    }
    if (spec.kind == InitialKind::PerturbedGreatCircle && spec.mode < 1) {
      throw std::invalid_argument("perturbation mode must be >= 1");
    }
  }

  template <class T>
  std::array<T, 3> operator()(const T& x) const {
    using std::cos;
    using std::sin;
    switch (spec_.kind) {
      case InitialKind::GreatCircle: return {cos(x), sin(x), T(0.0)};
      case InitialKind::Latitude: {
        const double r = spec_.radius;
        return {r * cos(x), r * sin(x), T(std::sqrt(1.0 - r * r))};
      }
      case InitialKind::PerturbedGreatCircle:
        return {cos(x), sin(x), spec_.amplitude * cos(static_cast<double>(spec_.mode) * x)};
      case InitialKind::BandLimitedRandom: {
        std::array<T, 3> p{cos(x), sin(x), T(0.0)};
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
          const double kk = static_cast<double>(k + 1);
          const T ck = cos(kk * x);
          const T sk = sin(kk * x);
          for (int c = 0; c < 3; ++c) {
            p[c] += spec_.amplitude * (coeffs_[k][c] * ck + coeffs_[k][c + 3] * sk) / kk;
          }
        }
        return p;
      }
    }
    return {T(0.0), T(0.0), T(0.0)};
  }

 private:
  InitialSpec spec_;
  std::vector<std::array<double, 6>> coeffs_;
};

/// Initial curve on the target: the ambient loop sampled on the grid and
/// pulled onto the surface. Deterministic for a fixed spec.
inline Curve make_initial(const InitialSpec& spec, const Grid& grid,
                          const Target& target = Target::unit_sphere()) {
  const AmbientLoop loop(spec);
  Curve curve{grid, Points(grid.size(), 3)};
  for (int j = 0; j < grid.size(); ++j) {
    const auto p = target.project_point(loop(grid.node(j)));
    curve.points.row(j) << p[0], p[1], p[2];
  }
  return curve;
}

/// Band-limited random ambient field (modes 0..max_mode), seeded.
inline VectorField random_ambient_field(const Grid& grid, int max_mode, std::uint64_t seed,
                                        double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 6>> coeffs(max_mode + 1);
  for (auto& c : coeffs) {
    for (double& v : c) v = unit_symmetric(rng);
  }
  return sample_vector(grid, [&](double x) {
    Vec3 v = Vec3::Zero();
    for (int k = 0; k <= max_mode; ++k) {
      for (int c = 0; c < 3; ++c) {
        v(c) += amplitude * (coeffs[k][c] * std::cos(k * x) + coeffs[k][c + 3] * std::sin(k * x));
      }
    }
    return v;
  });
}

inline VectorField random_tangent_field(const Target& target, const Curve& curve, int max_mode,
                                        std::uint64_t seed, double amplitude = 1.0) {
  return project_tangent(target, curve, random_ambient_field(curve.grid, max_mode, seed, amplitude));
}

}  // namespace dispflow
