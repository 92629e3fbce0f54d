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

#include <set>

#include <gtest/gtest.h>

#include "rydtoff/basis.hpp"
#include "rydtoff/error.hpp"

namespace rydtoff {
namespace {

TEST(LevelScheme, Dimension) {
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(LevelScheme(n).dimension(), std::size_t{1} << (2 * (n + 1)));
}

TEST(LevelScheme, IndexBijection) {
  LevelScheme s(3);
  std::set<BasisState> seen;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    BasisState b = s.state(i);
    EXPECT_EQ(s.index(b), i);
    seen.insert(b);
  }
  EXPECT_EQ(seen.size(), s.dimension());
}

TEST(LevelScheme, LevelOrdering) {
  LevelScheme s(1);
  // Control digit 2 is p, target digit 2 is s.
  EXPECT_EQ(level_of(s.state(2), 0), Level::kP);
  EXPECT_EQ(level_of(s.state(3), 0), Level::kS);
  EXPECT_EQ(level_of(s.state(8), 1), Level::kS);
  EXPECT_EQ(level_of(s.state(12), 1), Level::kP);
}

TEST(LevelScheme, LeakageLabelsHaveNoIndex) {
  LevelScheme s(2);
  EXPECT_THROW(s.index(with_level(0, 1, leak_a(0))), Error);
}

TEST(LevelScheme, TruthTable) {
  LevelScheme s(2);
  // Inputs written c1 c2 t.
  EXPECT_EQ(s.input_index(s.ideal_output(0b111)), 0b110u);
  EXPECT_EQ(s.input_index(s.ideal_output(0b110)), 0b111u);
  EXPECT_EQ(s.input_index(s.ideal_output(0b101)), 0b101u);
  BasisState in = s.computational(0b101);
  EXPECT_EQ(level_of(in, 0), Level::kOne);
  EXPECT_EQ(level_of(in, 1), Level::kZero);
  EXPECT_EQ(level_of(in, 2), Level::kOne);
}

TEST(LevelScheme, IdealOutputIsPermutation) {
  for (int n = 1; n <= 5; ++n) {
    LevelScheme s(n);
    std::set<std::size_t> images;
    for (std::size_t i = 0; i < s.n_inputs(); ++i) {
      std::size_t j = s.input_index(s.ideal_output(i));
      images.insert(j);
      if (i >> 1 == (s.n_inputs() - 1) >> 1) {
        EXPECT_EQ(j, i ^ 1u);
      } else {
        EXPECT_EQ(j, i);
      }
    }
    EXPECT_EQ(images.size(), s.n_inputs());
  }
}

TEST(BasisState, LevelEditing) {
  BasisState b = 0;
  b = with_level(b, 3, Level::kS);
  b = with_level(b, 15, Level::kPairSecond);
  EXPECT_EQ(level_of(b, 3), Level::kS);
  EXPECT_EQ(level_of(b, 15), Level::kPairSecond);
  EXPECT_EQ(level_of(b, 0), Level::kZero);
  b = with_level(b, 3, Level::kOne);
  EXPECT_EQ(level_of(b, 3), Level::kOne);
  EXPECT_EQ(leak_b(3), static_cast<Level>(11));
  EXPECT_TRUE(is_rydberg(Level::kP));
  EXPECT_FALSE(is_rydberg(leak_a(0)));
}

TEST(Subspace, SortedLookup) {
  Subspace s({9, 3, 3, 7});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], 3u);
  EXPECT_EQ(s.find(7), 1);
  EXPECT_EQ(s.find(8), -1);
}

}  // namespace
}  // namespace rydtoff
