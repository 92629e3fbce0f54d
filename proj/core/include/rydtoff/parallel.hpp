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
#include <functional>

namespace rydtoff {

// RYDTOFF_WORKERS if set and positive, otherwise the hardware concurrency.
int default_workers();

// Runs fn(i) for i in [0, count) on up to `workers` threads (<= 0 means
// default_workers()). The first exception thrown by any item is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace rydtoff
