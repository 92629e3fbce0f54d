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

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rydtoff/geometry.hpp"
#include "rydtoff/physparams.hpp"
#include "rydtoff/rng.hpp"

namespace rydtoff {

struct OptimizerConfig {
  double perturb_fraction = 0.1;  // half-width relative to the current angle
  double min_halfwidth = 0.01;    // rad, keeps angles at 0 movable
  // Each atom's window is scaled by 10^-U(0, scale_decades) per step; 0
  // reproduces the plain multiplicative window.
  double scale_decades = 6.0;
  double convergence_tol = 1e-5;
  long min_iterations = 100000;
  long max_iterations = 1000000;
  long patience = 20000;  // stop after this many rejections past min_iterations
  int ensemble_runs = 10000;
  std::uint64_t seed = 0;
  bool record_trace = false;
  int workers = 0;
  // Runs within this relative chi of the best enter the angle statistics.
  double converged_rel_tol = 1e-3;

  void validate() const;
};

struct TracePoint {
  long iteration = 0;
  double chi = 0.0;
};

struct OptimizerResult {
  Geometry geometry;
  double chi = 0.0;
  long iterations = 0;
  int run_index = 0;
  std::vector<TracePoint> trace;  // accepted steps, filled when requested
};

OptimizerResult optimize_run(int n, double radius, const SpeciesParams& sp,
                             const OptimizerConfig& cfg, Rng& rng);

// Same, starting from the given control angles instead of random ones.
OptimizerResult optimize_run_from(const std::vector<SphericalPoint>& initial, double radius,
                                  const SpeciesParams& sp, const OptimizerConfig& cfg, Rng& rng);

struct EnsembleResult {
  OptimizerResult best;
  std::vector<double> run_chi;
  std::vector<SphericalPoint> angle_mean;  // aligned to best, converged runs only
  std::vector<SphericalPoint> angle_std;
  int converged_runs = 0;
};

// Run k uses the stream derive_seed(cfg.seed, {k}).
EnsembleResult optimize_ensemble(int n, double radius, const SpeciesParams& sp,
                                 const OptimizerConfig& cfg);

struct NmaxResult {
  int n_max = 0;
  std::vector<int> n;
  std::vector<double> chi;
  std::vector<OptimizerResult> best;
};

// Optimizes n = 2, 3, ... until the best chi no longer exceeds threshold.
// n_max is the last n that passed, or 1 if n = 2 already fails.
NmaxResult find_n_max(double radius, const SpeciesParams& sp, const OptimizerConfig& cfg,
                      double threshold = 100.0, int n_limit = 15);

// Symmetries of chi: rotations about z, phi -> -phi and theta -> pi - theta.
// Finds the symmetry and atom relabelling that best maps `angles` onto
// `reference` and returns the transformed angles in reference order. Atoms
// within pole_tol of a pole take the reference phi.
std::vector<SphericalPoint> align_angles(const std::vector<SphericalPoint>& angles,
                                         const std::vector<SphericalPoint>& reference,
                                         double pole_tol = 0.05);

// Largest theta or phi difference after alignment; phi ignored at poles.
double max_angle_deviation(const std::vector<SphericalPoint>& angles,
                           const std::vector<SphericalPoint>& reference, double pole_tol = 0.05);

}  // namespace rydtoff
