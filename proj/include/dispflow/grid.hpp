// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file grid.hpp
/// @brief Periodic spectral calculus on the flat torus R/2piZ.
///
/// Fields are sampled at the uniform nodes x_j = 2*pi*j/n. Derivatives are
/// taken in Fourier space (mode k multiplied by (ik)^m); odd-order derivatives
/// zero the Nyquist mode so that real fields stay real. Transforms are backed
/// by FFTW with one cached plan pair per grid size.

#include <fftw3.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dispflow {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Vec3 = Eigen::Vector3d;

class Grid {
 public:
  Grid() = default;

  static Grid make(int n) {
    if (n < 8 || n % 2 != 0) {
      throw std::invalid_argument("grid size must be an even integer >= 8, got " +
                                  std::to_string(n));
    }
    Grid g;
    g.n_ = n;
    return g;
  }

  int size() const { return n_; }
  double spacing() const { return 2.0 * std::numbers::pi / n_; }
  double node(int j) const { return spacing() * j; }

  Eigen::VectorXd nodes() const {
    Eigen::VectorXd x(n_);
    for (int j = 0; j < n_; ++j) x(j) = node(j);
    return x;
  }

  /// Wavenumber of DFT slot j in standard ordering: 0..n/2-1, then -n/2..-1.
  int wavenumber(int j) const { return j < n_ / 2 ? j : j - n_; }

  std::vector<int> wavenumbers() const {
    std::vector<int> k(n_);
    for (int j = 0; j < n_; ++j) k[j] = wavenumber(j);
    return k;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_ = 0;
};

inline Grid make_grid(int n) { return Grid::make(n); }

struct ScalarField {
  Grid grid;
  Eigen::VectorXd values;
};

struct VectorField {
  Grid grid;
  Points values;
};

enum class Summation { Plain, Compensated };

namespace detail {

// FFTW's planner is not reentrant; execution on distinct arrays is.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    std::vector<double> real(n);
    std::vector<std::complex<double>> spec(n / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c_1d(n, real.data(), c, flags);
    inverse_ = fftw_plan_dft_c2r_1d(n, c, real.data(), flags | FFTW_DESTROY_INPUT);
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::vector<std::complex<double>> forward(const double* in) const {
    std::vector<double> buf(in, in + n_);
    std::vector<std::complex<double>> out(n_ / 2 + 1);
    fftw_execute_dft_r2c(forward_, buf.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  /// Unnormalized inverse; `spec` is consumed.
  void inverse(std::vector<std::complex<double>>& spec, double* out) const {
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(spec.data()), out);
  }

  int size() const { return n_; }

 private:
  int n_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

inline const FftPlan& plan_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

// Multiplier (ik)^m for r2c slot k (0..n/2).
inline std::complex<double> derivative_multiplier(int k, int n, int order) {
  if (k == n / 2) {
    if (order % 2 == 1) return {0.0, 0.0};
    const double nyq = std::pow(static_cast<double>(n / 2), order);
    return {(order / 2) % 2 == 0 ? nyq : -nyq, 0.0};
  }
  const double mag = std::pow(static_cast<double>(k), order);
  switch (order % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

inline void derivative_column(const double* in, double* out, int n, int order) {
  const auto& plan = plan_for(n);
  auto spec = plan.forward(in);
  const double scale = 1.0 / n;
  for (int k = 0; k <= n / 2; ++k) spec[k] *= derivative_multiplier(k, n, order) * scale;
  plan.inverse(spec, out);
}

// Several derivative orders from a single forward transform.
inline std::vector<Eigen::VectorXd> derivative_columns(const double* in, int n,
                                                       const std::vector<int>& orders) {
  const auto& plan = plan_for(n);
  const auto base = plan.forward(in);
  const double scale = 1.0 / n;
  std::vector<Eigen::VectorXd> result;
  result.reserve(orders.size());
  for (int order : orders) {
    auto spec = base;
    for (int k = 0; k <= n / 2; ++k) spec[k] *= derivative_multiplier(k, n, order) * scale;
    Eigen::VectorXd out(n);
    plan.inverse(spec, out.data());
    result.push_back(std::move(out));
  }
  return result;
}

inline void check_order(int order) {
  if (order < 1) {
    throw std::invalid_argument("derivative order must be >= 1, got " + std::to_string(order));
  }
}

// Spectral interpolation of one column onto n_new points.
inline Eigen::VectorXd resample_column(const double* in, int n_old, int n_new) {
  const auto& from = plan_for(n_old);
  const auto spec = from.forward(in);
  std::vector<std::complex<double>> out(n_new / 2 + 1, {0.0, 0.0});
  const int kmax = std::min(n_old, n_new) / 2;
  const double scale = 1.0 / n_old;
  for (int k = 0; k < kmax; ++k) out[k] = spec[k] * scale;
  // The shared top mode k = min/2 needs care: it is the Nyquist mode of the
  // smaller grid, which carries the cosine part only.
  if (n_new == n_old) {
    out[kmax] = spec[kmax] * scale;
  } else if (n_new > n_old) {
    out[kmax] = 0.5 * spec[kmax] * scale;
  } else {
    out[kmax] = std::complex<double>(2.0 * spec[kmax].real() * scale, 0.0);
  }
  Eigen::VectorXd result(n_new);
  plan_for(n_new).inverse(out, result.data());
  return result;
}

}  // namespace detail

inline ScalarField sample(const Grid& grid, const auto& fn) {
  ScalarField f{grid, Eigen::VectorXd(grid.size())};
  for (int j = 0; j < grid.size(); ++j) f.values(j) = fn(grid.node(j));
  return f;
}

inline VectorField sample_vector(const Grid& grid, const auto& fn) {
  VectorField f{grid, Points(grid.size(), 3)};
  for (int j = 0; j < grid.size(); ++j) f.values.row(j) = Vec3(fn(grid.node(j))).transpose();
  return f;
}

inline ScalarField spectral_derivative(const ScalarField& f, int order) {
  detail::check_order(order);
  ScalarField out{f.grid, Eigen::VectorXd(f.grid.size())};
  detail::derivative_column(f.values.data(), out.values.data(), f.grid.size(), order);
  return out;
}

inline VectorField spectral_derivative(const VectorField& f, int order) {
  detail::check_order(order);
  const int n = f.grid.size();
  VectorField out{f.grid, Points(n, 3)};
  for (int c = 0; c < 3; ++c) {
    detail::derivative_column(f.values.col(c).data(), out.values.col(c).data(), n, order);
  }
  return out;
}

/// Derivatives of several orders sharing one forward transform per component.
inline std::vector<VectorField> spectral_derivatives(const VectorField& f,
                                                     const std::vector<int>& orders) {
  for (int m : orders) detail::check_order(m);
  const int n = f.grid.size();
  std::vector<VectorField> out(orders.size(), VectorField{f.grid, Points(n, 3)});
  for (int c = 0; c < 3; ++c) {
    auto cols = detail::derivative_columns(f.values.col(c).data(), n, orders);
    for (std::size_t i = 0; i < orders.size(); ++i) out[i].values.col(c) = cols[i];
  }
  return out;
}

/// Trapezoid (equivalently rectangle) rule, spectrally exact for smooth
/// periodic integrands. Plain summation runs in node order.
inline double quadrature(const ScalarField& f, Summation mode = Summation::Plain) {
  double sum = 0.0;
  if (mode == Summation::Plain) {
    for (Eigen::Index j = 0; j < f.values.size(); ++j) sum += f.values(j);
  } else {
    double carry = 0.0;
    for (Eigen::Index j = 0; j < f.values.size(); ++j) {
      const double y = f.values(j) - carry;
      const double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
  }
  return f.grid.spacing() * sum;
}

inline ScalarField resample(const ScalarField& f, int n_new) {
  const Grid target = Grid::make(n_new);
  if (n_new == f.grid.size()) return f;
  return {target, detail::resample_column(f.values.data(), f.grid.size(), n_new)};
}

inline VectorField resample(const VectorField& f, int n_new) {
  const Grid target = Grid::make(n_new);
  if (n_new == f.grid.size()) return f;
  VectorField out{target, Points(n_new, 3)};
  for (int c = 0; c < 3; ++c) {
    out.values.col(c) = detail::resample_column(f.values.col(c).data(), f.grid.size(), n_new);
  }
  return out;
}

/// Zero every Fourier mode with |k| > kmax (the 2/3-rule uses kmax = n/3).
inline VectorField truncate_modes(const VectorField& f, int kmax) {
  const int n = f.grid.size();
  const auto& plan = detail::plan_for(n);
  VectorField out{f.grid, Points(n, 3)};
  for (int c = 0; c < 3; ++c) {
    auto spec = plan.forward(f.values.col(c).data());
    for (int k = 0; k <= n / 2; ++k) spec[k] = k > kmax ? 0.0 : spec[k] / static_cast<double>(n);
    plan.inverse(spec, out.values.col(c).data());
  }
  return out;
}

inline int two_thirds_cutoff(const Grid& grid) { return grid.size() / 3; }

inline double sup_norm(const VectorField& f) {
  return f.values.rowwise().norm().maxCoeff();
}

inline double sup_norm(const ScalarField& f) { return f.values.cwiseAbs().maxCoeff(); }

/// Sup over nodes of the Euclidean distance between two same-grid fields.
inline double sup_distance(const Points& a, const Points& b) {
  return (a - b).rowwise().norm().maxCoeff();
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": grid mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
}

}  // namespace dispflow
