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

#include "reproduce.hpp"

#include <ostream>
#include <sstream>

#include "acceptance.hpp"

namespace qpscope::acceptance {

int reproduce_all(const cli::Invocation& inv, cli::ArtifactWriter& w, std::ostream& out) {
  Options opt;
  opt.seed = inv.config.seed;
  opt.work_dir = inv.out_dir / "acceptance_work";
  opt.cli = [](const std::vector<std::string>& args) {
    std::ostringstream sink_out, sink_err;
    return cli::run(args, sink_out, sink_err);
  };
  const auto results =
      run_all(opt, [&](const CriterionResult& r) { out << format_line(r) << std::endl; });
  nlohmann::json doc = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    doc.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"checks", r.checks}});
    all = all && r.passed;
  }
  w.write_json("acceptance.json", {{"seed", opt.seed}, {"all_passed", all}, {"criteria", doc}});
  return all ? cli::kExitOk : cli::kExitAcceptance;
}

}  // namespace qpscope::acceptance
