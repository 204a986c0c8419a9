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

#include "config.hpp"

#include <fstream>
#include <iterator>
#include <cmath>
#include <set>
#include <sstream>

#include "qpscope/error.hpp"

namespace qpscope::cli {

namespace {

using nlohmann::json;

// Reads fields of one JSON object and remembers which keys were consumed so
// that leftovers can be reported.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParameterError("field " + label() + " must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key) {
    const json& v = fetch(key);
    if (!v.is_number()) throw ParameterError("field " + name(key) + " must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = fetch(key);
    if (!v.is_number_integer()) throw ParameterError("field " + name(key) + " must be an integer");
    return v.get<std::int64_t>();
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = fetch(key);
    if (!v.is_number_unsigned()) {
      throw ParameterError("field " + name(key) + " must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = fetch(key);
    if (!v.is_string()) throw ParameterError("field " + name(key) + " must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = fetch(key);
    if (!v.is_array()) throw ParameterError("field " + name(key) + " must be an array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ParameterError("field " + name(key) + " must hold numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Section child(const std::string& key) {
    static const json empty = json::object();
    if (!has(key)) return Section(empty, name(key));
    return Section(fetch(key), name(key));
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ParameterError("unknown key " + name(item.key()));
    }
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }
  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json& fetch(const std::string& key) {
    if (!has(key)) throw ParameterError("missing field " + name(key));
    seen_.insert(key);
    return obj_.at(key);
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a library validator and prefixes its message with the section name.
template <typename T>
void check(const char* section, const T& value) {
  try {
    validate(value);
  } catch (const ParameterError& e) {
    throw ParameterError(std::string("invalid ") + section + ": " + e.what());
  }
}

}  // namespace

std::vector<PlanPoint> PlanConfig::points() const {
  std::vector<PlanPoint> out;
  for (double t : temperatures_k) {
    for (double p : p1) out.push_back({t, p});
  }
  return out;
}

RunConfig parse_config(const nlohmann::json& doc) {
  RunConfig cfg;
  Section root(doc, "");

  {
    Section s = root.child("device");
    DeviceParams& d = cfg.device;
    d.ej_ghz = s.number("ej_ghz");
    d.ec_ghz = s.number("ec_ghz");
    d.delta_ghz = s.number("delta_ghz");
    d.ddelta_ghz = s.number("ddelta_ghz");
    d.x_res = s.number("x_res");
    d.vol_ratio = s.number("vol_ratio", d.vol_ratio);
    d.n_cp = s.number("n_cp", d.n_cp);
    const std::string tp = s.text("thermal_prefactor", to_string(d.thermal_prefactor));
    d.thermal_prefactor = thermal_prefactor_from_string(tp.c_str());
    s.finish();
    check("device", d);
  }
  {
    Section s = root.child("env");
    EnvConditions& e = cfg.env;
    e.temp_k = s.number("temp_k", 0.020);
    e.gamma_offset = s.number("gamma_offset", e.gamma_offset);
    e.f0_ghz = s.number("f0_ghz", e.f0_ghz);
    e.g0 = s.number("g0", e.g0);
    s.finish();
    check("env", e);
  }
  {
    Section s = root.child("readout");
    ReadoutModel& r = cfg.readout;
    const auto angles = s.numbers("cluster_angles",
                                  {r.cluster_angles.begin(), r.cluster_angles.end()});
    if (angles.size() != r.cluster_angles.size()) {
      throw ParameterError("field readout.cluster_angles must hold 4 angles");
    }
    std::copy(angles.begin(), angles.end(), r.cluster_angles.begin());
    r.radius = s.number("radius", r.radius);
    r.sigma = s.number("sigma", r.sigma);
    r.mis_prob_plus = s.number("mis_prob_plus", r.mis_prob_plus);
    r.mis_prob_minus = s.number("mis_prob_minus", r.mis_prob_minus);
    s.finish();
    check("readout", r);
  }
  {
    Section s = root.child("kinetics");
    KineticsParams& k = cfg.kinetics;
    k.g = s.number("g", k.g);
    k.s = s.number("s", k.s);
    k.r = s.number("r", k.r);
    s.finish();
    check("kinetics", k);
  }
  {
    Section s = root.child("plan");
    cfg.plan.temperatures_k = s.numbers("temperatures_k", cfg.plan.temperatures_k);
    cfg.plan.p1 = s.numbers("p1", cfg.plan.p1);
    s.finish();
    if (cfg.plan.temperatures_k.empty() || cfg.plan.p1.empty()) {
      throw ParameterError("invalid plan: temperatures_k and p1 must be nonempty");
    }
    for (double t : cfg.plan.temperatures_k) {
      if (!(t > 0.0)) throw ParameterError("invalid plan: temperatures must be positive");
    }
    for (double p : cfg.plan.p1) {
      if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("invalid plan: p1 must lie in [0, 1]");
    }
  }
  {
    Section s = root.child("simulation");
    SimulationOptions& o = cfg.simulation;
    o.n_traces = static_cast<int>(s.integer("n_traces", o.n_traces));
    o.duration_s = s.number("duration_s", o.duration_s);
    o.dt_s = s.number("dt_s", o.dt_s);
    s.finish();
    if (o.n_traces < 1) throw ParameterError("invalid simulation: n_traces must be positive");
    if (!(o.dt_s > 0.0) || !(o.duration_s >= 100.0 * o.dt_s)) {
      throw ParameterError("invalid simulation: need dt_s > 0 and at least 100 samples");
    }
  }
  {
    Section s = root.child("sweep");
    SweepConfig& w = cfg.sweep;
    w.t_min_k = s.number("t_min_k", w.t_min_k);
    w.t_max_k = s.number("t_max_k", w.t_max_k);
    w.t_step_k = s.number("t_step_k", w.t_step_k);
    w.arrhenius_min_k = s.number("arrhenius_min_k", w.arrhenius_min_k);
    w.arrhenius_max_k = s.number("arrhenius_max_k", w.arrhenius_max_k);
    s.finish();
    if (!(w.t_min_k > 0.0 && w.t_max_k >= w.t_min_k && w.t_step_k > 0.0)) {
      throw ParameterError("invalid sweep: need 0 < t_min_k <= t_max_k and t_step_k > 0");
    }
    if (!(w.arrhenius_min_k > 0.0 && w.arrhenius_max_k > w.arrhenius_min_k)) {
      throw ParameterError("invalid sweep: Arrhenius window is empty");
    }
  }
  {
    Section s = root.child("pump");
    PumpSweepConfig& p = cfg.pump;
    p.ratio = s.number("ratio", p.ratio);
    p.t1_s = s.number("t1_s", p.t1_s);
    p.p_e_max = s.number("p_e_max", p.p_e_max);
    p.points = static_cast<int>(s.integer("points", p.points));
    s.finish();
    if (!(p.ratio > 0.0) || !(p.t1_s > 0.0)) {
      throw ParameterError("invalid pump: ratio and t1_s must be positive");
    }
    if (!(p.p_e_max > 0.0 && p.p_e_max <= 0.5) || p.points < 2) {
      throw ParameterError("invalid pump: need 0 < p_e_max <= 0.5 and at least 2 points");
    }
  }
  {
    Section s = root.child("analysis");
    AnalysisConfig& a = cfg.analysis;
    a.gmm_components = static_cast<int>(s.integer("gmm_components", a.gmm_components));
    a.gmm_max_points = static_cast<std::size_t>(
        s.integer("gmm_max_points", static_cast<std::int64_t>(a.gmm_max_points)));
    s.finish();
    if (a.gmm_components < kReadoutStates) {
      throw ParameterError("invalid analysis: gmm_components must be at least 4");
    }
    if (a.gmm_max_points < 1000) throw ParameterError("invalid analysis: gmm_max_points too small");
  }

  cfg.simulation.ng = root.number("ng", cfg.simulation.ng);
  if (!std::isfinite(cfg.simulation.ng)) throw ParameterError("invalid ng");
  cfg.simulation.method = rate_method_from_string(root.text("method", "auto"));
  cfg.photon_elements =
      photon_elements_from_string(root.text("photon_elements", to_string(cfg.photon_elements)));
  cfg.seed = root.unsigned_integer("seed", cfg.seed);
  cfg.output_dir = root.text("output_dir", cfg.output_dir);
  root.finish();
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // An empty or whitespace-only file reads as an empty object.
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return parse_config(nlohmann::json::object());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  const DeviceParams& d = c.device;
  return json{
      {"device",
       {{"ej_ghz", d.ej_ghz},
        {"ec_ghz", d.ec_ghz},
        {"delta_ghz", d.delta_ghz},
        {"ddelta_ghz", d.ddelta_ghz},
        {"x_res", d.x_res},
        {"vol_ratio", d.vol_ratio},
        {"n_cp", d.n_cp},
        {"thermal_prefactor", to_string(d.thermal_prefactor)}}},
      {"env",
       {{"temp_k", c.env.temp_k},
        {"gamma_offset", c.env.gamma_offset},
        {"f0_ghz", c.env.f0_ghz},
        {"g0", c.env.g0}}},
      {"readout",
       {{"cluster_angles", c.readout.cluster_angles},
        {"radius", c.readout.radius},
        {"sigma", c.readout.sigma},
        {"mis_prob_plus", c.readout.mis_prob_plus},
        {"mis_prob_minus", c.readout.mis_prob_minus}}},
      {"kinetics", {{"g", c.kinetics.g}, {"s", c.kinetics.s}, {"r", c.kinetics.r}}},
      {"plan", {{"temperatures_k", c.plan.temperatures_k}, {"p1", c.plan.p1}}},
      {"simulation",
       {{"n_traces", c.simulation.n_traces},
        {"duration_s", c.simulation.duration_s},
        {"dt_s", c.simulation.dt_s}}},
      {"sweep",
       {{"t_min_k", c.sweep.t_min_k},
        {"t_max_k", c.sweep.t_max_k},
        {"t_step_k", c.sweep.t_step_k},
        {"arrhenius_min_k", c.sweep.arrhenius_min_k},
        {"arrhenius_max_k", c.sweep.arrhenius_max_k}}},
      {"pump",
       {{"ratio", c.pump.ratio},
        {"t1_s", c.pump.t1_s},
        {"p_e_max", c.pump.p_e_max},
        {"points", c.pump.points}}},
      {"analysis",
       {{"gmm_components", c.analysis.gmm_components},
        {"gmm_max_points", c.analysis.gmm_max_points}}},
      {"ng", c.simulation.ng},
      {"method", to_string(c.simulation.method)},
      {"photon_elements", to_string(c.photon_elements)},
      {"seed", c.seed},
      {"output_dir", c.output_dir}};
}

RunConfig default_config() {
  RunConfig c;
  c.device = reference_device();
  c.env = reference_environment();
  c.seed = 20260101;
  return c;
}

}  // namespace qpscope::cli
