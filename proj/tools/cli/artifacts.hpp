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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qpscope::cli {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);

// Collects the files written by one subcommand and emits manifest.json.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Writes to a temporary sibling and renames it into place. `relative` may
  // contain subdirectories, which are created.
  void write(const std::string& relative, std::string_view contents);
  void write_json(const std::string& relative, const nlohmann::json& doc);

  // Input bytes that determine the outputs (canonical config, input files).
  void add_input(std::string_view label, std::string_view bytes);

  void write_manifest(const std::string& subcommand, std::uint64_t seed,
                      const std::string& method);

 private:
  std::filesystem::path root_;
  std::uint64_t inputs_hash_ = 0xcbf29ce484222325ULL;
  std::vector<std::pair<std::string, std::string>> artifacts_;  // path, hash
};

}  // namespace qpscope::cli
