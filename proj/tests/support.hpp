// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dispflow/cli.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline constexpr double kPi = std::numbers::pi;

/// Seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  std::uint64_t seed() { return rng_(); }

  dispflow::FlowParams params() {
    return {uniform(-2, 2), uniform(-2, 2), uniform(-2, 2), uniform(-2, 2), 0.0, 1.0};
  }

 private:
  std::mt19937_64 rng_;
};

inline dispflow::InitialSpec random_spec(std::uint64_t seed, double amplitude = 0.1, int max_mode = 4) {
  dispflow::InitialSpec s;
  s.kind = dispflow::InitialKind::BandLimitedRandom;
  s.seed = seed;
  s.amplitude = amplitude;
  s.max_mode = max_mode;
  return s;
}

inline dispflow::Curve great_circle(int n) {
  dispflow::InitialSpec s;
  s.kind = dispflow::InitialKind::GreatCircle;
  return dispflow::make_initial(s, dispflow::Grid::make(n));
}

inline dispflow::Curve latitude(int n, double r) {
  dispflow::InitialSpec s;
  s.kind = dispflow::InitialKind::Latitude;
  s.radius = r;
  return dispflow::make_initial(s, dispflow::Grid::make(n));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dispflow_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
