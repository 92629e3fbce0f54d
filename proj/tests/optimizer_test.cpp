// Copyright 2025 The rydtoff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "rydtoff/error.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/optimizer.hpp"
#include "support.hpp"

namespace rydtoff {
namespace {

const SpeciesParams kSp60 = lookup_species(60);

OptimizerConfig quick(int runs, std::uint64_t seed = 7) {
  OptimizerConfig cfg;
  cfg.ensemble_runs = runs;
  cfg.seed = seed;
  return cfg;
}

TEST(Optimizer, TwoControlsGoToPoles) {
  EnsembleResult e = optimize_ensemble(2, 5.0, kSp60, quick(20));
  auto a = control_angles(e.best.geometry);
  for (const auto& p : a) EXPECT_LT(std::min(p.theta, kPi - p.theta), 0.01);
  EXPECT_GT(std::abs(a[0].theta - a[1].theta), kPi - 0.02);
  EXPECT_NEAR(e.best.chi, 5592.0, 0.01 * 5592.0);
}

TEST(Optimizer, FourControlsFormTetrahedron) {
  EnsembleResult e = optimize_ensemble(4, 5.0, kSp60, quick(100));
  EXPECT_NEAR(e.best.chi, 828.44, 0.01 * 828.44);
  const auto& c = e.best.geometry.controls;
  for (int j = 0; j < 4; ++j) {
    for (int k = j + 1; k < 4; ++k) {
      EXPECT_NEAR((c[j] - c[k]).norm(), 5.0 * std::sqrt(8.0 / 3.0), 0.05);
    }
  }
}

const std::vector<SphericalPoint> kTableAverage = {{1.5708, 3.1416}, {1.5707, 4.7124}, {1.5709, 0.0},
                                                   {1.5708, 1.5707}, {0.0005, 0.0006}, {3.1416, 0.0007}};

TEST(Optimizer, SixControlsMatchOctahedralAverage) {
  EnsembleResult e = optimize_ensemble(6, 5.0, kSp60, quick(150));
  EXPECT_NEAR(e.best.chi, 349.5, 0.01 * 349.5);
  EXPECT_LT(max_angle_deviation(control_angles(e.best.geometry), kTableAverage), 0.01);
  ASSERT_GE(e.converged_runs, 2);
  EXPECT_LT(max_angle_deviation(e.angle_mean, kTableAverage), 0.01);
  for (const auto& s : e.angle_std) {
    EXPECT_LT(s.theta, 0.01);
  }
}

TEST(Optimizer, SingleRunEnsembleEqualsRun) {
  OptimizerConfig cfg = quick(1, 99);
  EnsembleResult e = optimize_ensemble(5, 5.0, kSp60, cfg);
  Rng rng = make_rng(99, {0});
  OptimizerResult r = optimize_run(5, 5.0, kSp60, cfg, rng);
  EXPECT_EQ(e.best.chi, r.chi);
  EXPECT_EQ(e.best.iterations, r.iterations);
  for (int j = 0; j < 5; ++j) EXPECT_EQ(e.best.geometry.controls[j], r.geometry.controls[j]);
}

TEST(Optimizer, ResultChiIsRecomputable) {
  Rng rng = make_rng(5, {});
  OptimizerResult r = optimize_run(5, 5.0, kSp60, quick(1), rng);
  EXPECT_EQ(r.chi, chi_min(r.geometry, kSp60));
  EXPECT_GE(r.iterations, 100000);
}

TEST(Optimizer, TraceIsMonotone) {
  OptimizerConfig cfg = quick(1);
  cfg.record_trace = true;
  Rng rng = make_rng(8, {});
  OptimizerResult r = optimize_run(6, 5.0, kSp60, cfg, rng);
  ASSERT_GT(r.trace.size(), 2u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_GT(r.trace[i].chi, r.trace[i - 1].chi);
    EXPECT_GT(r.trace[i].iteration, r.trace[i - 1].iteration);
  }
  EXPECT_NEAR(r.trace.back().chi, r.chi, 1e-12 * r.chi);
}

TEST(Optimizer, GeometryIndependentOfCoefficientScale) {
  for (double lambda : {4.0, 0.5}) {
    SpeciesParams scaled = kSp60;
    scaled.c3 *= lambda;
    scaled.c6 *= lambda;
    Rng a = make_rng(31, {});
    Rng b = make_rng(31, {});
    OptimizerResult ra = optimize_run(5, 5.0, kSp60, quick(1), a);
    OptimizerResult rb = optimize_run(5, 5.0, scaled, quick(1), b);
    EXPECT_EQ(ra.chi, rb.chi);
    for (int j = 0; j < 5; ++j) EXPECT_EQ(ra.geometry.controls[j], rb.geometry.controls[j]);
  }
}

TEST(Optimizer, DeterministicAcrossWorkers) {
  OptimizerConfig c1 = quick(12, 3);
  c1.workers = 1;
  OptimizerConfig c4 = c1;
  c4.workers = 4;
  EnsembleResult a = optimize_ensemble(4, 5.0, kSp60, c1);
  EnsembleResult b = optimize_ensemble(4, 5.0, kSp60, c4);
  EXPECT_EQ(a.run_chi, b.run_chi);
  EXPECT_EQ(a.best.run_index, b.best.run_index);
}

TEST(Optimizer, ConfigValidation) {
  OptimizerConfig cfg;
  cfg.perturb_fraction = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = OptimizerConfig{};
  cfg.convergence_tol = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  Rng rng = make_rng(0, {});
  EXPECT_THROW(optimize_run(1, 5.0, kSp60, quick(1), rng), Error);
}

TEST(Optimizer, InfiniteThresholdStopsAtFloor) {
  OptimizerConfig cfg = quick(2);
  cfg.min_iterations = 1000;
  cfg.patience = 500;
  NmaxResult r = find_n_max(5.0, kSp60, cfg, std::numeric_limits<double>::infinity());
  EXPECT_EQ(r.n_max, 1);
  EXPECT_EQ(r.n, std::vector<int>{2});
}

TEST(Alignment, RecoversSymmetryImages) {
  const auto ref = control_angles(testing::octahedron());
  std::vector<SphericalPoint> moved;
  for (const auto& p : ref) moved.push_back(SphericalPoint::normalized(kPi - p.theta, 0.7 - p.phi));
  std::swap(moved[0], moved[3]);
  EXPECT_LT(max_angle_deviation(moved, ref), 1e-9);
  auto aligned = align_angles(moved, ref);
  for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(aligned[j].theta, ref[j].theta, 1e-9);
}

}  // namespace
}  // namespace rydtoff
