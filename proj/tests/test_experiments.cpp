// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

using namespace dispflow;

TEST(ParallelMap, OrderIndependentOfJobs) {
  const auto f = [](std::size_t i) { return static_cast<double>(i * i); };
  EXPECT_EQ(parallel_map(17, 1, f), parallel_map(17, 4, f));
  EXPECT_EQ(parallel_map(17, 4, f)[16], 256.0);
}

TEST(ParallelMap, PropagatesLowestIndexException) {
  const auto f = [](std::size_t i) -> int {
    if (i == 3) throw std::runtime_error("three");
    if (i == 5) throw std::runtime_error("five");
    return 0;
  };
  try {
    parallel_map(8, 3, f);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "three");
  }
}

TEST(FitSlope, Line) {
  EXPECT_NEAR(fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0, 1e-15);
}

TEST(ConvergenceStudy, GreatCircleErrorsAtRoundoff) {
  ConvergenceOptions opt;
  opt.base = default_convergence_base();
  opt.base.initial.radius = 1.0;
  opt.base.n = 16;
  opt.base.t_end = 0.01;
  opt.n_list = {16};
  opt.self_convergence = false;
  const auto r = convergence_study(opt);
  for (const auto& c : r.cases) EXPECT_LE(c["sup_error"].get<double>(), 1e-12);
}

TEST(ConvergenceStudy, RejectsNonLatitude) {
  ConvergenceOptions opt;
  opt.base = default_convergence_base();
  opt.base.initial.kind = InitialKind::GreatCircle;
  EXPECT_THROW(convergence_study(opt), std::invalid_argument);
}

TEST(EpsilonStudy, GreatCircleStationaryAndDeterministic) {
  EpsilonOptions opt;
  opt.base = default_epsilon_base();
  opt.base.initial.kind = InitialKind::GreatCircle;
  opt.base.n = 16;
  opt.base.t_end = 0.002;
  const auto a = epsilon_study(opt);
  for (double d : a.fitted["distances"]) EXPECT_LE(d, 1e-11);
  opt.base.initial.kind = InitialKind::PerturbedGreatCircle;
  opt.jobs = 3;
  const auto b = epsilon_study(opt);
  const auto c = epsilon_study(opt);
  EXPECT_EQ(b.fitted.dump(), c.fitted.dump());
  EXPECT_TRUE(b.passed());
}

TEST(EpsilonStudy, RejectsBadList) {
  EpsilonOptions opt;
  opt.base = default_epsilon_base();
  opt.eps_list = {1e-2, 1e-3};
  EXPECT_THROW(epsilon_study(opt), std::invalid_argument);
  opt.eps_list = {1e-3, 1e-2, 0};
  EXPECT_THROW(epsilon_study(opt), std::invalid_argument);
}

TEST(StabilityStudy, SmallRunIsConsistent) {
  StabilityOptions opt;
  opt.base = default_stability_base();
  opt.base.n = 32;
  opt.base.t_end = 0.005;
  opt.samples = 20;
  const auto r = stability_study(opt);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " = " << c.value;
  const auto& zero = r.cases.front();
  EXPECT_EQ(zero["delta"].get<double>(), 0.0);
  for (double v : zero["D_gauged"]) EXPECT_EQ(v, 0.0);
}

TEST(StabilityStudy, PerturbationIsAdmissible) {
  const Target s = Target::unit_sphere();
  const Curve base = make_initial(testing_support::random_spec(3), Grid::make(32));
  const Curve p = perturb_curve(s, base, 1e-3, 2);
  EXPECT_LE(constraint_residual(s, p), 1e-15);
  EXPECT_GT(sup_distance(p.points, base.points), 1e-4);
  EXPECT_EQ(perturb_curve(s, base, 0.0, 2).points, base.points);
}

TEST(IdentitySuite, PassesOnDefaults) {
  const auto r = identity_suite(IdentityOptions{});
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " = " << c.value;
}

TEST(IdentitySuite, OtherTargetsSkipSphereOnlyChecks) {
  IdentityOptions opt;
  opt.target = Target::ellipsoid(2, 1, 1);
  opt.seeds = 4;
  const auto r = identity_suite(opt);
  for (const auto& c : r.checks) {
    EXPECT_EQ(c.name.find("Gauss-Codazzi"), std::string::npos);
    EXPECT_TRUE(c.pass) << c.name << " = " << c.value;
  }
}

TEST(Serialization, NdjsonLinesAreJson) {
  IdentityOptions opt;
  opt.seeds = 2;
  const auto text = study_ndjson(identity_suite(opt));
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);) EXPECT_NO_THROW(json::parse(l));
  EXPECT_NE(study_summary(identity_suite(opt)).find("PASS"), std::string::npos);
}
