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

#include "rydtoff/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "rydtoff/error.hpp"

namespace rydtoff {

namespace {

constexpr double kTaylorTol = 1e-16;
constexpr int kTaylorMaxTerms = 80;

void taylor_step(const SparseOp& h, CVector& psi, double tau, CVector& term, CVector& tmp) {
  term = psi;
  const cplx factor(0.0, -tau);
  for (int k = 1; k <= kTaylorMaxTerms; ++k) {
    tmp.noalias() = h * term;
    term = tmp * (factor / static_cast<double>(k));
    psi += term;
    if (k >= 4 && term.norm() <= kTaylorTol * psi.norm()) break;
  }
}

}  // namespace

int dyadic_levels(double duration, double resolution) {
  if (!(resolution > 0.0) || !(duration > resolution)) return 0;
  return static_cast<int>(std::ceil(std::log2(duration / resolution) - 1e-12));
}

double inf_norm(const SparseOp& h) {
  double m = 0.0;
  for (int r = 0; r < h.outerSize(); ++r) {
    double s = 0.0;
    for (SparseOp::InnerIterator it(h, r); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

TaylorPropagator::TaylorPropagator(SparseOp h, double duration, int levels, double theta)
    : StagePropagator(duration, levels), h_(std::move(h)), norm_(inf_norm(h_)), theta_(theta) {
  double ratio = norm_ * duration / theta_;
  coarsest_ = ratio <= 1.0 ? 0 : std::min(levels_, static_cast<int>(std::ceil(std::log2(ratio))));
}

void TaylorPropagator::advance(CVector& psi, int level) const {
  const double tau = std::ldexp(duration_, -level);
  const int sub = std::max(1, static_cast<int>(std::ceil(norm_ * tau / theta_)));
  for (int s = 0; s < sub; ++s) taylor_step(h_, psi, tau / sub, term_, tmp_);
}

DensePropagator::DensePropagator(const SparseOp& h, double duration, int levels)
    : StagePropagator(duration, levels) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd(h) * cplx(0.0, -std::ldexp(duration, -levels));
  steps_.resize(levels + 1);
  steps_[levels] = a.exp();
  for (int l = levels - 1; l >= 0; --l) steps_[l] = steps_[l + 1] * steps_[l + 1];
}

void DensePropagator::advance(CVector& psi, int level) const {
  tmp_.noalias() = steps_[level] * psi;
  psi.swap(tmp_);
}

std::unique_ptr<StagePropagator> make_propagator(const SparseOp& h, double duration, int levels,
                                                 PropagatorKind kind) {
  if (!(duration >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative stage duration");
  if (kind == PropagatorKind::kAuto) {
    // Dense cost is paid once per cached subspace, Taylor cost on every pass.
    const double d = static_cast<double>(h.rows());
    const double dense_cost = (levels + 12.0) * d * d * d;
    const double taylor_cost =
        (inf_norm(h) * duration / 2.0 + 1.0) * 16.0 * static_cast<double>(h.nonZeros() + h.rows());
    kind = dense_cost < 100.0 * taylor_cost ? PropagatorKind::kDense : PropagatorKind::kTaylor;
  }
  if (kind == PropagatorKind::kDense) return std::make_unique<DensePropagator>(h, duration, levels);
  return std::make_unique<TaylorPropagator>(h, duration, levels);
}

CVector expm_apply(const SparseOp& h, const CVector& psi, double t) {
  CVector out = psi, term, tmp;
  int steps = std::max(1, static_cast<int>(std::ceil(inf_norm(h) * std::abs(t))));
  for (int s = 0; s < steps; ++s) taylor_step(h, out, t / steps, term, tmp);
  return out;
}

}  // namespace rydtoff
