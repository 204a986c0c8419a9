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

#include "qpscope/rng.hpp"

namespace qpscope {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t root, std::string_view name, std::uint64_t a,
                             std::uint64_t b) {
  std::uint64_t h = mix64(root);
  for (unsigned char c : name) h = mix64(h ^ c);
  h = mix64(h ^ mix64(a));
  return mix64(h ^ mix64(b + 0x632be59bd9b4e019ULL));
}

Engine make_engine(std::uint64_t root, std::string_view name, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{substream_seed(root, name, a, b), substream_seed(root, name, a, b + 1)};
  return Engine(seq);
}

}  // namespace qpscope
