// Copyright 2026 The qpscope Authors
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
#include <random>
#include <string_view>

namespace qpscope {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed for the named substream (name, a, b) of a root seed. Distinct names or
// indices give statistically independent engines.
std::uint64_t substream_seed(std::uint64_t root, std::string_view name, std::uint64_t a = 0,
                             std::uint64_t b = 0);

using Engine = std::mt19937_64;

Engine make_engine(std::uint64_t root, std::string_view name, std::uint64_t a = 0,
                   std::uint64_t b = 0);

}  // namespace qpscope
