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

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rydtoff {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

enum class PropagatorKind { kAuto, kTaylor, kDense };

// Finest dyadic level K with duration / 2^K <= resolution.
int dyadic_levels(double duration, double resolution);

// exp(-i H t) for a constant, possibly non-Hermitian, stage Hamiltonian on
// the dyadic grid t = duration / 2^level, level in [0, levels()].
// Not thread-safe: advance() reuses internal buffers.
class StagePropagator {
 public:
  StagePropagator(double duration, int levels) : duration_(duration), levels_(levels) {}
  virtual ~StagePropagator() = default;

  double duration() const { return duration_; }
  int levels() const { return levels_; }
  // Coarsest level the propagator handles in a single cheap step.
  int coarsest() const { return coarsest_; }

  virtual void advance(CVector& psi, int level) const = 0;

 protected:
  double duration_;
  int levels_;
  int coarsest_ = 0;
};

// Max absolute row sum.
double inf_norm(const SparseOp& h);

// Truncated Taylor series on substeps with ||H|| tau <= theta.
class TaylorPropagator final : public StagePropagator {
 public:
  TaylorPropagator(SparseOp h, double duration, int levels, double theta = 2.0);
  void advance(CVector& psi, int level) const override;

 private:
  SparseOp h_;
  double norm_;
  double theta_;
  mutable CVector term_, tmp_;
};

// Dense exp(-i H duration / 2^L) for every level, built by repeated squaring.
class DensePropagator final : public StagePropagator {
 public:
  DensePropagator(const SparseOp& h, double duration, int levels);
  void advance(CVector& psi, int level) const override;

 private:
  std::vector<Eigen::MatrixXcd> steps_;
  mutable CVector tmp_;
};

std::unique_ptr<StagePropagator> make_propagator(const SparseOp& h, double duration, int levels,
                                                 PropagatorKind kind);

// exp(-i H t) psi by Taylor substeps, for arbitrary t.
CVector expm_apply(const SparseOp& h, const CVector& psi, double t);

}  // namespace rydtoff
