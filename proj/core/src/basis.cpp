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

#include "rydtoff/basis.hpp"

#include <algorithm>
#include <string>

#include "rydtoff/error.hpp"

namespace rydtoff {

namespace {

int digit_of(Level l, bool target) {
  switch (l) {
    case Level::kZero: return 0;
    case Level::kOne: return 1;
    case Level::kP: return target ? 3 : 2;
    case Level::kS: return target ? 2 : 3;
    default: return -1;
  }
}

Level level_of_digit(int d, bool target) {
  switch (d) {
    case 0: return Level::kZero;
    case 1: return Level::kOne;
    case 2: return target ? Level::kS : Level::kP;
    default: return target ? Level::kP : Level::kS;
  }
}

}  // namespace

LevelScheme::LevelScheme(int n_controls) : n_(n_controls) {
  if (n_controls < 1 || n_controls + 1 > kMaxAtoms) {
    throw Error(ErrorCode::kInvalidArgument,
                "number of controls must lie in [1, " + std::to_string(kMaxAtoms - 1) + "]");
  }
}

std::size_t LevelScheme::dimension() const { return std::size_t{1} << (2 * (n_ + 1)); }

std::size_t LevelScheme::index(BasisState s) const {
  std::size_t idx = 0;
  for (int a = n_; a >= 0; --a) {
    int d = digit_of(level_of(s, a), a == n_);
    if (d < 0) throw Error(ErrorCode::kInvalidArgument, "leakage label has no nominal index");
    idx = idx * 4 + static_cast<std::size_t>(d);
  }
  return idx;
}

BasisState LevelScheme::state(std::size_t index) const {
  if (index >= dimension()) throw Error(ErrorCode::kInvalidArgument, "basis index out of range");
  BasisState s = 0;
  for (int a = 0; a <= n_; ++a) {
    s = with_level(s, a, level_of_digit(static_cast<int>(index % 4), a == n_));
    index /= 4;
  }
  return s;
}

BasisState LevelScheme::computational(std::size_t input) const {
  if (input >= n_inputs()) throw Error(ErrorCode::kInvalidArgument, "input index out of range");
  BasisState s = 0;
  s = with_level(s, n_, (input & 1u) ? Level::kOne : Level::kZero);
  for (int j = 0; j < n_; ++j) {
    bool bit = (input >> (n_ - j)) & 1u;
    s = with_level(s, j, bit ? Level::kOne : Level::kZero);
  }
  return s;
}

std::size_t LevelScheme::input_index(BasisState s) const {
  std::size_t input = 0;
  for (int j = 0; j < n_; ++j) {
    Level l = level_of(s, j);
    if (l != Level::kZero && l != Level::kOne) {
      throw Error(ErrorCode::kInvalidArgument, "not a computational state");
    }
    if (l == Level::kOne) input |= std::size_t{1} << (n_ - j);
  }
  Level t = level_of(s, n_);
  if (t != Level::kZero && t != Level::kOne) throw Error(ErrorCode::kInvalidArgument, "not a computational state");
  if (t == Level::kOne) input |= 1u;
  return input;
}

BasisState LevelScheme::ideal_output(std::size_t input) const {
  BasisState s = computational(input);
  const std::size_t controls_mask = (n_inputs() - 1) & ~std::size_t{1};
  if ((input & controls_mask) == controls_mask) {
    Level t = level_of(s, n_);
    s = with_level(s, n_, t == Level::kOne ? Level::kZero : Level::kOne);
  }
  return s;
}

Subspace::Subspace(std::vector<BasisState> states) : states_(std::move(states)) {
  std::sort(states_.begin(), states_.end());
  states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
  index_.reserve(states_.size() * 2);
  for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = static_cast<long>(i);
}

long Subspace::find(BasisState s) const {
  auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace rydtoff
