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

#include "rydtoff/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rydtoff/error.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/parallel.hpp"

namespace rydtoff {

void OptimizerConfig::validate() const {
  if (!(perturb_fraction > 0.0 && perturb_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "perturb_fraction must lie in (0, 1)");
  }
  if (!(convergence_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "convergence_tol must be > 0");
  if (min_halfwidth < 0.0 || scale_decades < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "min_halfwidth and scale_decades must be >= 0");
  }
  if (min_iterations < 0 || max_iterations < min_iterations || patience < 1) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent iteration limits");
  }
  if (ensemble_runs < 1) throw Error(ErrorCode::kInvalidArgument, "ensemble_runs must be >= 1");
}

namespace {

// chi from angles with the target at the origin.
class ChiEvaluator {
 public:
  ChiEvaluator(int n, double radius, const SpeciesParams& sp)
      : n_(n), radius_(radius), sp_(sp), pos_(n), f_(n) {}

  double operator()(const std::vector<double>& theta, const std::vector<double>& phi) {
    for (int j = 0; j < n_; ++j) {
      double st = std::sin(theta[j]), ct = std::cos(theta[j]);
      pos_[j] = Vec3(radius_ * st * std::cos(phi[j]), radius_ * st * std::sin(phi[j]), radius_ * ct);
      f_[j] = std::abs(1.0 - 3.0 * ct * ct);
    }
    const double ct_scale = std::abs(sp_.c3) / (radius_ * radius_ * radius_);
    const double cc_scale = std::abs(sp_.c6);
    double chi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_; ++j) {
      for (int k = j + 1; k < n_; ++k) {
        double d2 = (pos_[j] - pos_[k]).squaredNorm();
        double ucc = cc_scale / (d2 * d2 * d2);
        chi = std::min(chi, ct_scale * std::min(f_[j], f_[k]) / ucc);
      }
    }
    return chi;
  }

 private:
  int n_;
  double radius_;
  SpeciesParams sp_;
  std::vector<Vec3> pos_;
  std::vector<double> f_;
};

double halfwidth(double value, const OptimizerConfig& cfg) {
  return std::max(cfg.perturb_fraction * std::abs(value), cfg.min_halfwidth);
}

}  // namespace

OptimizerResult optimize_run_from(const std::vector<SphericalPoint>& initial, double radius,
                                  const SpeciesParams& sp, const OptimizerConfig& cfg, Rng& rng) {
  cfg.validate();
  const int n = static_cast<int>(initial.size());
  if (n < 2) throw Error(ErrorCode::kSingleControl, "optimizer needs at least two controls");
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");

  std::vector<double> theta(n), phi(n);
  for (int j = 0; j < n; ++j) {
    auto p = SphericalPoint::normalized(initial[j].theta, initial[j].phi);
    theta[j] = p.theta;
    phi[j] = p.phi;
  }
  ChiEvaluator chi_of(n, radius, sp);
  double best = chi_of(theta, phi);
  if (!std::isfinite(best)) best = 0.0;

  OptimizerResult res;
  if (cfg.record_trace) res.trace.push_back({0, best});
  std::vector<double> t2(n), p2(n);
  long iter = 0, since_accept = 0;
  double last_gain = std::numeric_limits<double>::infinity();
  while (iter < cfg.max_iterations) {
    ++iter;
    for (int j = 0; j < n; ++j) {
      double s = cfg.scale_decades > 0.0 ? std::pow(10.0, -cfg.scale_decades * uniform01(rng)) : 1.0;
      double wt = halfwidth(theta[j], cfg) * s;
      double wp = halfwidth(phi[j], cfg) * s;
      t2[j] = std::clamp(theta[j] + uniform(rng, -wt, wt), 0.0, kPi);
      p2[j] = wrap_phi(phi[j] + uniform(rng, -wp, wp));
    }
    double c = chi_of(t2, p2);
    if (c > best) {
      last_gain = c - best;
      best = c;
      theta.swap(t2);
      phi.swap(p2);
      since_accept = 0;
      if (cfg.record_trace) res.trace.push_back({iter, best});
    } else {
      ++since_accept;
    }
    if (iter >= cfg.min_iterations && (last_gain < cfg.convergence_tol || since_accept >= cfg.patience)) {
      break;
    }
  }
  std::vector<SphericalPoint> pts(n);
  for (int j = 0; j < n; ++j) pts[j] = {theta[j], phi[j]};
  res.geometry = geometry_from_angles(radius, pts);
  res.chi = chi_min(res.geometry, sp);
  res.iterations = iter;
  return res;
}

OptimizerResult optimize_run(int n, double radius, const SpeciesParams& sp,
                             const OptimizerConfig& cfg, Rng& rng) {
  if (n < 2) throw Error(ErrorCode::kSingleControl, "optimizer needs at least two controls");
  std::vector<SphericalPoint> init(n);
  for (auto& p : init) {
    p.theta = uniform(rng, 0.0, kPi);
    p.phi = uniform(rng, 0.0, kTwoPi);
  }
  return optimize_run_from(init, radius, sp, cfg, rng);
}

namespace {

double phi_diff(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d < -kPi) d += kTwoPi;
  return d;
}

bool near_pole(double theta, double tol) { return theta < tol || theta > kPi - tol; }

Vec3 unit(const SphericalPoint& p) { return to_cartesian(p, 1.0); }

}  // namespace

std::vector<SphericalPoint> align_angles(const std::vector<SphericalPoint>& angles,
                                         const std::vector<SphericalPoint>& reference,
                                         double pole_tol) {
  const std::size_t n = angles.size();
  if (reference.size() != n) throw Error(ErrorCode::kInvalidArgument, "align_angles: size mismatch");

  std::vector<double> offsets{0.0};
  std::vector<SphericalPoint> best_out;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int flip_theta = 0; flip_theta < 2; ++flip_theta) {
    for (int sign : {1, -1}) {
      std::vector<SphericalPoint> base(n);
      for (std::size_t a = 0; a < n; ++a) {
        base[a].theta = flip_theta ? kPi - angles[a].theta : angles[a].theta;
        base[a].phi = sign * angles[a].phi;
      }
      offsets.assign(1, 0.0);
      for (std::size_t a = 0; a < n; ++a) {
        if (near_pole(base[a].theta, pole_tol)) continue;
        for (std::size_t b = 0; b < n; ++b) {
          if (near_pole(reference[b].theta, pole_tol)) continue;
          offsets.push_back(reference[b].phi - base[a].phi);
        }
      }
      for (double off : offsets) {
        std::vector<Vec3> moved(n);
        for (std::size_t a = 0; a < n; ++a) moved[a] = unit({base[a].theta, base[a].phi + off});
        // Greedy matching on chord distance.
        std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
        pairs.reserve(n * n);
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) {
            pairs.emplace_back((moved[a] - unit(reference[b])).squaredNorm(), a, b);
          }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<int> match(n, -1);
        std::vector<bool> used(n, false);
        double cost = 0.0;
        for (const auto& [d, a, b] : pairs) {
          if (used[a] || match[b] >= 0) continue;
          used[a] = true;
          match[b] = static_cast<int>(a);
          cost += d;
        }
        if (cost < best_cost) {
          best_cost = cost;
          best_out.assign(n, {});
          for (std::size_t b = 0; b < n; ++b) {
            const auto& src = base[match[b]];
            SphericalPoint p = SphericalPoint::normalized(src.theta, src.phi + off);
            if (near_pole(p.theta, pole_tol)) p.phi = reference[b].phi;
            best_out[b] = p;
          }
        }
      }
    }
  }
  return best_out;
}

double max_angle_deviation(const std::vector<SphericalPoint>& angles,
                           const std::vector<SphericalPoint>& reference, double pole_tol) {
  auto aligned = align_angles(angles, reference, pole_tol);
  double dev = 0.0;
  for (std::size_t b = 0; b < aligned.size(); ++b) {
    dev = std::max(dev, std::abs(aligned[b].theta - reference[b].theta));
    if (!near_pole(reference[b].theta, pole_tol)) {
      dev = std::max(dev, std::abs(phi_diff(aligned[b].phi, reference[b].phi)));
    }
  }
  return dev;
}

EnsembleResult optimize_ensemble(int n, double radius, const SpeciesParams& sp,
                                 const OptimizerConfig& cfg) {
  cfg.validate();
  std::vector<OptimizerResult> runs(cfg.ensemble_runs);
  parallel_for(runs.size(), cfg.workers, [&](std::size_t k) {
    Rng rng = make_rng(cfg.seed, {k});
    runs[k] = optimize_run(n, radius, sp, cfg, rng);
    runs[k].run_index = static_cast<int>(k);
  });

  EnsembleResult out;
  std::size_t best = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out.run_chi.push_back(runs[k].chi);
    if (runs[k].chi > runs[best].chi) best = k;
  }
  out.best = runs[best];

  auto ref = control_angles(out.best.geometry);
  std::vector<std::vector<SphericalPoint>> accepted;
  for (const auto& r : runs) {
    if (r.chi < out.best.chi * (1.0 - cfg.converged_rel_tol)) continue;
    accepted.push_back(align_angles(control_angles(r.geometry), ref));
  }
  out.converged_runs = static_cast<int>(accepted.size());
  out.angle_mean.assign(n, {});
  out.angle_std.assign(n, {});
  const double m = static_cast<double>(accepted.size());
  for (int j = 0; j < n; ++j) {
    double ts = 0.0, ss = 0.0, cs = 0.0;
    for (const auto& a : accepted) {
      ts += a[j].theta;
      ss += std::sin(a[j].phi);
      cs += std::cos(a[j].phi);
    }
    out.angle_mean[j] = {ts / m, wrap_phi(std::atan2(ss, cs))};
    double tv = 0.0, pv = 0.0;
    for (const auto& a : accepted) {
      tv += std::pow(a[j].theta - out.angle_mean[j].theta, 2);
      pv += std::pow(phi_diff(a[j].phi, out.angle_mean[j].phi), 2);
    }
    out.angle_std[j] = {std::sqrt(tv / m), std::sqrt(pv / m)};
  }
  return out;
}

NmaxResult find_n_max(double radius, const SpeciesParams& sp, const OptimizerConfig& cfg,
                      double threshold, int n_limit) {
  NmaxResult out;
  out.n_max = 1;
  for (int n = 2; n <= n_limit; ++n) {
    EnsembleResult e = optimize_ensemble(n, radius, sp, cfg);
    out.n.push_back(n);
    out.chi.push_back(e.best.chi);
    out.best.push_back(e.best);
    if (!(e.best.chi > threshold)) break;
    out.n_max = n;
  }
  return out;
}

}  // namespace rydtoff
