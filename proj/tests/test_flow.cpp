// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <complex>

using namespace dispflow;
using testing_support::Gen;
using cplx = std::complex<double>;

namespace {

/// Direct O(n^2) DFT of the planar curve u1 + i u2.
std::vector<cplx> dft(const Points& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<cplx> out(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      out[k] += cplx(p(j, 0), p(j, 1)) * std::polar(1.0, -2.0 * std::numbers::pi * k * j / n);
    }
  }
  return out;
}

Points inverse_dft(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size());
  Points p = Points::Zero(n, 3);
  for (int j = 0; j < n; ++j) {
    cplx s = 0;
    for (int k = 0; k < n; ++k) s += c[k] * std::polar(1.0, 2.0 * std::numbers::pi * k * j / n);
    p(j, 0) = s.real() / n;
    p(j, 1) = s.imag() / n;
  }
  return p;
}

Curve planar_curve(int n, double delta, int mode) {
  const Grid g = Grid::make(n);
  Curve c{g, Points::Zero(n, 3)};
  for (int j = 0; j < n; ++j) {
    const double x = g.node(j);
    c.points(j, 0) = std::cos(x) + delta * std::cos(mode * x);
    c.points(j, 1) = std::sin(x) + 0.5 * delta * std::sin(mode * x);
  }
  return c;
}

}  // namespace

TEST(Rhs, GreatCircleIsStationaryForAllForms) {
  const Target s = Target::unit_sphere();
  const Curve c = testing_support::great_circle(16);
  Gen gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    FlowParams p = gen.params();
    EXPECT_LE(sup_norm(rhs_intrinsic(p, s, c)), 1e-12);
    EXPECT_LE(sup_norm(rhs_extrinsic_sphere(p, s, c)), 1e-12);
    p.epsilon = gen.uniform(0, 1);
    EXPECT_LE(sup_norm(rhs_regularized(p, s, c)), 1e-12);
  }
}

TEST(Rhs, SchrodingerMapOnLatitude) {
  const Target s = Target::unit_sphere();
  const double r = 0.6, h = 0.8;
  const Curve c = testing_support::latitude(32, r);
  const FlowParams p = preset("schrodinger-map");
  const auto intrinsic = rhs_intrinsic(p, s, c);
  EXPECT_LE(sup_distance(intrinsic.values, rhs_extrinsic_sphere(p, s, c).values), 1e-10);
  EXPECT_LE(sup_distance(intrinsic.values, (-p.lambda * h * velocity(s, c)).values), 1e-12);
}

TEST(Rhs, ExtrinsicLatitudeRotates) {
  const Target s = Target::unit_sphere();
  const double r = 0.6, h = 0.8;
  const FlowParams p{1.0, 0.3, -0.7, 1.0, 0.0, 1.0};
  const double omega = h * (p.a - p.lambda - (p.a + p.b) * r * r);
  const Curve c = testing_support::latitude(32, r);
  const auto f = rhs_extrinsic_sphere(p, s, c);
  const auto ux = velocity(s, c);
  for (int j = 0; j < 32; ++j) {
    const Vec3 fj = f.values.row(j).transpose();
    const Vec3 uj = ux.values.row(j).transpose();
    EXPECT_NEAR(fj.dot(uj) / uj.squaredNorm(), omega, 1e-10);
    EXPECT_LE((fj - omega * uj).norm(), 1e-10);
  }
  EXPECT_NEAR(latitude_speed({1, 0, 0, 1, 0, 1}, 0.6), -0.288, 1e-15);
}

TEST(Rhs, ExtrinsicMatchesIntrinsicSpectrally) {
  const Target s = Target::unit_sphere();
  const FlowParams p = detail::equivalence_params();
  const auto spec = testing_support::random_spec(11, 0.02, 8);
  const auto diff = [&](int n) {
    const Curve c = make_initial(spec, Grid::make(n));
    return sup_distance(rhs_intrinsic(p, s, c).values, rhs_extrinsic_sphere(p, s, c).values);
  };
  const double d32 = diff(32), d128 = diff(128);
  EXPECT_LE(d128, 1e-8);
  EXPECT_GE(d32 / d128, 100.0);
}

TEST(Rhs, ExtrinsicRequiresSphere) {
  const Target t = Target::flat_torus();
  const Curve c = make_initial(testing_support::random_spec(1), Grid::make(16), t);
  EXPECT_THROW(rhs_extrinsic_sphere(preset("integrable"), t, c), std::invalid_argument);
}

TEST(Rhs, FlatTorusLinearOperatorModeByMode) {
  const Target t = Target::flat_torus();
  const int n = 32;
  const Curve c = planar_curve(n, 0.2, 5);
  const FlowParams p{1.3, 0.0, 0.0, 0.7, 0.0, 0.0};
  auto coeffs = dft(c.points);
  for (int k = 0; k < n; ++k) {
    const double w = k < n / 2 ? k : k - n;
    const double w2 = w * w;
    coeffs[k] *= cplx(0, 1) * (p.a * w2 * w2 - p.lambda * w2);
  }
  const Points want = inverse_dft(coeffs);
  EXPECT_LE(sup_distance(rhs_intrinsic(p, t, c).values, want), 1e-9);
}

TEST(Rhs, RegularizedAtZeroIsIntrinsicBitForBit) {
  const Target s = Target::unit_sphere();
  const Curve c = make_initial(testing_support::random_spec(4), Grid::make(32));
  const FlowParams p = preset("heisenberg-biquadratic");
  EXPECT_EQ(rhs_regularized(p, s, c).values, rhs_intrinsic(p, s, c).values);
}

TEST(Rhs, RegularizationOutOfRangeRejected) {
  const Target s = Target::unit_sphere();
  const Curve c = testing_support::great_circle(16);
  FlowParams p = preset("integrable");
  p.epsilon = 1.5;
  EXPECT_THROW(rhs_regularized(p, s, c), std::invalid_argument);
  p.epsilon = -0.1;
  EXPECT_THROW(rhs_regularized(p, s, c), std::invalid_argument);
}

// Linear flow on the flat torus: mode k of u1 + i u2 obeys z' = (i a - eps) k^4 z.
TEST(Rhs, RegularizationDampsModeAtEpsK4) {
  const int n = 16, mode = 3;
  RunConfig cfg;
  cfg.target.kind = TargetKind::FlatTorus;
  cfg.params = FlowParams{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  cfg.rhs = RhsChoice::Auto;
  cfg.n = n;
  cfg.t_end = 0.01;
  cfg.stepper.safety = 0.5;
  const Curve c0 = planar_curve(n, 1e-3, mode);
  const auto traj = run_from(cfg, c0);
  EXPECT_EQ(traj.rhs, RhsKind::Regularized);
  const auto before = dft(c0.points);
  const auto after = dft(traj.final_state.curve.points);
  for (int k : {mode, n - mode}) {
    const double predicted = std::abs(before[k]) * std::exp(-cfg.params.epsilon * std::pow(mode, 4) * cfg.t_end);
    EXPECT_NEAR(std::abs(after[k]), predicted, 1e-8 * std::abs(before[k])) << k;
  }
}

TEST(Rhs, TimeReversalNegatesRhs) {
  const Target s = Target::unit_sphere();
  const Curve c = make_initial(testing_support::random_spec(8), Grid::make(32));
  Gen gen(32);
  for (int trial = 0; trial < 5; ++trial) {
    const FlowParams p = gen.params();
    EXPECT_EQ(rhs_intrinsic(time_reversed(p), s, c).values, -rhs_intrinsic(p, s, c).values);
  }
}

TEST(Rhs, StepForwardThenReversedReturns) {
  const Target s = Target::unit_sphere();
  const Curve c = make_initial(testing_support::random_spec(8), Grid::make(32));
  const FlowParams p = preset("integrable");
  const double dt = estimate_dt(p, c.grid, 0.1);
  const State s0{0.0, c, 0, 0.0, 0.0};
  const State s1 = step(s0, dt, RhsKind::Extrinsic, s, p);
  const State s2 = step(s1, dt, RhsKind::Extrinsic, s, time_reversed(p));
  EXPECT_LE(sup_distance(s2.curve.points, c.points), 1e-10);
  EXPECT_GT(sup_distance(s1.curve.points, c.points), 1e-8);
}

TEST(Presets, Table) {
  const FlowParams am = preset("anco-myrzakulov");
  EXPECT_EQ(am, (FlowParams{-1.0, -1.0, -0.5, 0.0, 0.0, 1.0}));
  const FlowParams in = preset("integrable");
  EXPECT_EQ(in.a, 1.0);
  EXPECT_EQ(in.b, 1.5);
  EXPECT_EQ(in.c, 0.0);
  EXPECT_EQ(in.lambda, 1.0);
  const FlowParams sm = preset("schrodinger-map");
  EXPECT_EQ(sm, (FlowParams{0, 0, 0, 1, 0, 1}));
  const FlowParams hb = preset("heisenberg-biquadratic");
  EXPECT_EQ(3 * hb.a - 2 * hb.b + hb.c, 0.0);
  EXPECT_THROW(preset("heisenberg"), std::invalid_argument);
  EXPECT_TRUE(is_preset_name("integrable"));
  EXPECT_FALSE(is_preset_name("Integrable"));
}
