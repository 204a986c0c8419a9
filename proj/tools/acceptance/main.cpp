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

// Prints one PASS/FAIL line per acceptance criterion. Exits 4 when any fails.

#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qpscope acceptance suite", "qpscope_acceptance"};
  qpscope::acceptance::Options opt;
  std::string work_dir = "acceptance_work";
  std::vector<int> only;
  app.add_option("--seed", opt.seed, "Root seed");
  app.add_option("--work-dir", work_dir, "Scratch directory for CLI artifacts");
  app.add_option("--only", only, "Run just these criteria")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  opt.work_dir = work_dir;
  opt.cli = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = qpscope::cli::run(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
  };

  using namespace qpscope::acceptance;
  using Fn = CriterionResult (*)(const Options&);
  const Fn all[] = {rate_reproduction, method_equivalence, activation_energies, transmon_numbers,
                    no_gap_ratio_check, photon_channel,    parity_pumping,      kinetics,
                    pipeline_closure,  determinism};
  const std::set<int> pick(only.begin(), only.end());
  bool ok = true;
  for (int id = 1; id <= 10; ++id) {
    if (!pick.empty() && !pick.count(id)) continue;
    CriterionResult r;
    try {
      r = all[id - 1](opt);
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "raised an exception";
      r.checks.push_back(std::string("FAIL ") + e.what());
    }
    std::cout << format_line(r) << "  (" << r.seconds << " s)" << std::endl;
    ok = ok && r.passed;
  }
  return ok ? 0 : 4;
}
