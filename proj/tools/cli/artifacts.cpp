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

#include "artifacts.hpp"

#include <boost/version.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include <fstream>
#include <iterator>

#include "qpscope/error.hpp"
#include "qpscope/version.hpp"

namespace qpscope::cli {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ArtifactWriter::ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void ArtifactWriter::write(const std::string& relative, std::string_view contents) {
  const std::filesystem::path target = root_ / relative;
  std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ParameterError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
  artifacts_.emplace_back(relative, hex64(fnv1a64(contents)));
}

void ArtifactWriter::write_json(const std::string& relative, const nlohmann::json& doc) {
  write(relative, doc.dump(2) + "\n");
}

void ArtifactWriter::add_input(std::string_view label, std::string_view bytes) {
  inputs_hash_ = fnv1a64(label, inputs_hash_);
  inputs_hash_ = fnv1a64(std::string_view("\0", 1), inputs_hash_);
  inputs_hash_ = fnv1a64(bytes, inputs_hash_);
}

void ArtifactWriter::write_manifest(const std::string& subcommand, std::uint64_t seed,
                                    const std::string& method) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [path, hash] : artifacts_) files.push_back({{"path", path}, {"fnv1a64", hash}});
  const nlohmann::json manifest = {
      {"tool", "qpscope"},
      {"subcommand", subcommand},
      {"seed", seed},
      {"method", method},
      {"inputs_hash", hex64(inputs_hash_)},
      {"versions",
       {{"qpscope", kVersion},
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                              EIGEN_MINOR_VERSION)},
        {"boost", fmt::format("{}.{}.{}", BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000,
                              BOOST_VERSION % 100)},
        {"fmt", fmt::format("{}", FMT_VERSION)}}},
      {"artifacts", files}};
  const std::string text = manifest.dump(2) + "\n";
  const std::filesystem::path target = root_ / "manifest.json";
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace qpscope::cli
