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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "app.hpp"
#include "artifacts.hpp"
#include "config.hpp"
#include "qpscope/error.hpp"
#include "test_support.hpp"

namespace qpscope::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kReferenceConfig = fs::path(QPSCOPE_CONFIG_DIR) / "paper_device.json";

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qpscope_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int invoke(const std::vector<std::string>& args, std::string* out_text = nullptr,
           std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cells.push_back(c);
  return cells;
}

TEST(ConfigTest, EmptyDocumentNamesMissingField) {
  QPSCOPE_EXPECT_THROW_MSG(parse_config(json::object()), ParameterError, "missing field device");
  json doc = to_json(default_config());
  doc["device"].erase("ej_ghz");
  QPSCOPE_EXPECT_THROW_MSG(parse_config(doc), ParameterError, "missing field device.ej_ghz");
}

TEST(ConfigTest, UnknownKeyIsRejected) {
  json doc = to_json(default_config());
  doc["foo"] = 1;
  QPSCOPE_EXPECT_THROW_MSG(parse_config(doc), ParameterError, "unknown key foo");
}

TEST(ConfigTest, ReferenceConfigLoadsAndRoundTrips) {
  const RunConfig cfg = parse_config_file(kReferenceConfig);
  EXPECT_DOUBLE_EQ(cfg.device.ej_ghz, 6.24);
  EXPECT_DOUBLE_EQ(cfg.env.gamma_offset, 0.14);
  EXPECT_EQ(cfg.plan.points().size(), 30u);
  EXPECT_EQ(to_json(parse_config(to_json(cfg))), to_json(cfg));
}

TEST(ConfigTest, InvalidValuesAreReported) {
  json doc = to_json(default_config());
  doc["device"]["ej_ghz"] = -1.0;
  QPSCOPE_EXPECT_THROW_MSG(parse_config(doc), ParameterError, "ej_ghz");
  doc = to_json(default_config());
  doc["pump"]["p_e_max"] = 0.7;
  QPSCOPE_EXPECT_THROW_MSG(parse_config(doc), ParameterError, "invalid pump");
}

TEST(CliTest, RatesTableMatchesReferenceRate) {
  const fs::path dir = scratch_dir("rates");
  ASSERT_EQ(invoke({"rates", "--config", kReferenceConfig.string(), "--out", dir.string()}), kExitOk);
  std::istringstream csv(read_file(dir / "rates.csv"));
  std::string line;
  std::getline(csv, line);
  const auto header = split(line);
  const auto col = std::find(header.begin(), header.end(), "gamma1") - header.begin();
  ASSERT_LT(col, static_cast<long>(header.size()));
  bool found = false;
  while (std::getline(csv, line)) {
    const auto cells = split(line);
    if (std::abs(std::stod(cells[0]) - 0.020) < 1e-9) {
      EXPECT_TRUE(testing::RelNear(std::stod(cells[col]), 4.7, 0.05));
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(CliTest, RepeatedRunsAreByteIdentical) {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  for (const std::string cmd : {"spectrum", "pump"}) {
    ASSERT_EQ(invoke({cmd, "--config", kReferenceConfig.string(), "--out", a.string()}), kExitOk);
    ASSERT_EQ(invoke({cmd, "--config", kReferenceConfig.string(), "--out", b.string()}), kExitOk);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    EXPECT_EQ(read_file(entry.path()), read_file(b / rel)) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 3u);
}

TEST(CliTest, ErrorsAreStructuredJson) {
  std::string err;
  EXPECT_EQ(invoke({"rates", "--config", "/nonexistent/config.json"}, nullptr, &err), kExitConfig);
  const json doc = json::parse(err);
  EXPECT_EQ(doc["error"]["kind"], "config");
  EXPECT_EQ(doc["error"]["exit_code"], kExitConfig);

  EXPECT_EQ(invoke({"frobnicate"}, nullptr, &err), kExitConfig);
  EXPECT_EQ(json::parse(err)["error"]["kind"], "usage");
  EXPECT_EQ(invoke({"analyze"}, nullptr, &err), kExitConfig);
}

TEST(CliTest, RateTableRoundTrip) {
  const std::vector<RatePoint> pts = {{0.02, 0.1405, 0.01, 0}, {0.05, 12.5, 0.7, 1}};
  const std::string csv = write_rate_table(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "temp_k,gamma,sigma,state");
  const auto back = read_rate_table(csv);
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_DOUBLE_EQ(back[i].temp_k, pts[i].temp_k);
    EXPECT_DOUBLE_EQ(back[i].gamma, pts[i].gamma);
    EXPECT_DOUBLE_EQ(back[i].sigma, pts[i].sigma);
    EXPECT_EQ(back[i].state, pts[i].state);
  }
  QPSCOPE_EXPECT_THROW_MSG(read_rate_table("a,b\n"), ParameterError, "header");
}

}  // namespace
}  // namespace qpscope::cli
