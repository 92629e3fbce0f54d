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

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace rydtoff {

// Per-atom level labels, four bits each in a BasisState. Atoms 0..n-1 are
// controls, atom n is the target.
enum class Level : std::uint8_t {
  kZero = 0,
  kOne = 1,
  kP = 2,
  kS = 3,
  // Control-target leakage pair labels; channel k uses kLeakA + 2k / kLeakB + 2k.
  kLeakA = 4,
  kLeakB = 5,
  // Control-control leakage pair, lower control index carries kPairFirst.
  kPairFirst = 12,
  kPairSecond = 13,
};

inline constexpr int kMaxAtoms = 16;
inline constexpr int kMaxLeakChannels = 4;

using BasisState = std::uint64_t;

inline Level level_of(BasisState s, int atom) {
  return static_cast<Level>((s >> (4 * atom)) & 0xFu);
}

inline BasisState with_level(BasisState s, int atom, Level l) {
  const int shift = 4 * atom;
  return (s & ~(BasisState{0xF} << shift)) | (BasisState{static_cast<std::uint8_t>(l)} << shift);
}

inline Level leak_a(int channel) { return static_cast<Level>(4 + 2 * channel); }
inline Level leak_b(int channel) { return static_cast<Level>(5 + 2 * channel); }

inline bool is_rydberg(Level l) { return l == Level::kP || l == Level::kS; }

// Nominal composite basis without leakage labels. Controls order their
// levels {0, 1, p, s}, the target {0, 1, s, p}; the index is the base-4
// number with atom a as digit a.
class LevelScheme {
 public:
  explicit LevelScheme(int n_controls);

  int n_controls() const { return n_; }
  int n_atoms() const { return n_ + 1; }
  int target() const { return n_; }
  std::size_t dimension() const;

  std::size_t index(BasisState s) const;  // throws for leakage labels
  BasisState state(std::size_t index) const;

  std::size_t n_inputs() const { return std::size_t{1} << (n_ + 1); }
  // Input bit string c_1 ... c_n t, target least significant.
  BasisState computational(std::size_t input) const;
  std::size_t input_index(BasisState s) const;  // inverse on computational states
  BasisState ideal_output(std::size_t input) const;

 private:
  int n_;
};

class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::vector<BasisState> states);

  std::size_t size() const { return states_.size(); }
  const std::vector<BasisState>& states() const { return states_; }
  BasisState operator[](std::size_t i) const { return states_[i]; }
  // -1 if absent.
  long find(BasisState s) const;

 private:
  std::vector<BasisState> states_;
  std::unordered_map<BasisState, long> index_;
};

}  // namespace rydtoff
