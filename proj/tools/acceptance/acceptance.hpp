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
#include <functional>
#include <string>
#include <vector>

namespace qpscope::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<std::string> checks;  // one entry per sub-check, prefixed ok/FAIL
  double seconds = 0.0;
};

// Runs the command-line front end in-process with argv-style arguments.
using CliRunner = std::function<int(const std::vector<std::string>&)>;

struct Options {
  std::uint64_t seed = 20260101;
  std::filesystem::path work_dir = "acceptance_work";
  CliRunner cli;  // required by criterion 10
};

CriterionResult rate_reproduction(const Options& opt);
CriterionResult method_equivalence(const Options& opt);
CriterionResult activation_energies(const Options& opt);
CriterionResult transmon_numbers(const Options& opt);
CriterionResult no_gap_ratio_check(const Options& opt);
CriterionResult photon_channel(const Options& opt);
CriterionResult parity_pumping(const Options& opt);
CriterionResult kinetics(const Options& opt);
CriterionResult pipeline_closure(const Options& opt);
CriterionResult determinism(const Options& opt);

// All ten in order. `on_result` is called as each finishes.
std::vector<CriterionResult> run_all(const Options& opt,
                                     const std::function<void(const CriterionResult&)>& on_result);

// "criterion N: PASS|FAIL  title  [check; check; ...]"
std::string format_line(const CriterionResult& r);

}  // namespace qpscope::acceptance
