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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "artifacts.hpp"
#include "config.hpp"
#include "json.hpp"
#include "qpscope/inference.hpp"

namespace qpscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitAcceptance = 4;

struct Invocation {
  std::string subcommand;
  RunConfig config;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> input;
};

// Runs the acceptance suite for reproduce-all. Returns the exit status.
using ReproduceHook =
    std::function<int(const Invocation&, ArtifactWriter&, std::ostream& out)>;

// Parses argv-style arguments (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const ReproduceHook& reproduce = {});

// Subcommands, callable in-process. Each writes its artifacts through `w`.
void cmd_spectrum(const RunConfig& cfg, ArtifactWriter& w);
void cmd_rates(const RunConfig& cfg, ArtifactWriter& w);
void cmd_pump(const RunConfig& cfg, ArtifactWriter& w);
void cmd_kinetics(const RunConfig& cfg, ArtifactWriter& w);
void cmd_simulate(const RunConfig& cfg, ArtifactWriter& w);
void cmd_analyze(const RunConfig& cfg, const std::filesystem::path& dataset_dir,
                 ArtifactWriter& w);
void cmd_fit(const RunConfig& cfg, const std::filesystem::path& table, ArtifactWriter& w);

nlohmann::json to_json(const FitResult& fit);

// `temp_k,gamma,sigma,state` with a header row.
std::vector<RatePoint> read_rate_table(const std::string& csv);
std::string write_rate_table(const std::vector<RatePoint>& points);

}  // namespace qpscope::cli
