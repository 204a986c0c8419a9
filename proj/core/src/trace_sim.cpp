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

#include "qpscope/trace_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "qpscope/error.hpp"
#include "qpscope/parallel.hpp"
#include "qpscope/rng.hpp"

namespace qpscope {

int state_parity(int state) { return state < 2 ? 1 : -1; }
int state_plasmon(int state) { return state % 2; }
int make_state(int plasmon, int parity) { return (parity == 1 ? 0 : 2) + plasmon; }

ReadoutModel validate(const ReadoutModel& m) {
  if (!(m.sigma > 0.0)) throw ParameterError("readout sigma must be positive");
  if (!(m.radius > 0.0)) throw ParameterError("readout radius must be positive");
  for (double p : {m.mis_prob_plus, m.mis_prob_minus}) {
    if (!(p >= 0.0 && p < 1.0)) throw ParameterError("mis_prob must lie in [0, 1)");
  }
  for (int a = 0; a < kReadoutStates; ++a) {
    if (!std::isfinite(m.cluster_angles[a])) throw ParameterError("cluster angles must be finite");
    for (int b = a + 1; b < kReadoutStates; ++b) {
      const double d = std::remainder(m.cluster_angles[a] - m.cluster_angles[b],
                                      2.0 * std::numbers::pi);
      if (std::abs(d) < 1e-9) throw ParameterError("cluster angles must be distinct");
    }
  }
  return m;
}

int ParityPath::parity_at(double t) const {
  const auto flips = std::upper_bound(switch_times.begin(), switch_times.end(), t) -
                     switch_times.begin();
  return flips % 2 == 0 ? initial_parity : -initial_parity;
}

ParityPath simulate_parity_path(double gamma_pm, double gamma_mp, double duration_s,
                                std::uint64_t seed) {
  if (!(gamma_pm >= 0.0) || !(gamma_mp >= 0.0)) throw ParameterError("rates must be nonnegative");
  if (!(duration_s > 0.0)) throw ParameterError("duration must be positive");
  Engine eng = make_engine(seed, "parity_path");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double total = gamma_pm + gamma_mp;
  const double p_plus = total > 0.0 ? gamma_mp / total : 0.5;

  ParityPath path;
  path.duration_s = duration_s;
  path.initial_parity = unit(eng) < p_plus ? 1 : -1;
  int parity = path.initial_parity;
  double t = 0.0;
  while (true) {
    const double rate = parity == 1 ? gamma_pm : gamma_mp;
    if (rate <= 0.0) break;
    t += std::exponential_distribution<double>(rate)(eng);
    if (t > duration_s) break;
    path.switch_times.push_back(t);
    parity = -parity;
  }
  return path;
}

JumpTrace emit_readout(const ParityPath& path, double p1, const ReadoutModel& model, double dt_s,
                       double duration_s, std::uint64_t seed) {
  validate(model);
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("p1 must lie in [0, 1]");
  if (!(dt_s > 0.0)) throw ParameterError("dt_s must be positive");
  const auto n = static_cast<std::size_t>(std::floor(duration_s / dt_s + 1e-9));
  if (n == 0) throw ParameterError("trace would be empty");

  Engine eng = make_engine(seed, "readout");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> other(1, kReadoutStates - 1);
  std::normal_distribution<double> noise(0.0, model.sigma);

  JumpTrace tr;
  tr.dt_s = dt_s;
  tr.i_quad.resize(n);
  tr.q_quad.resize(n);
  tr.truth_parity.resize(n);
  tr.truth_plasmon.resize(n);
  tr.misassigned.resize(n);
  std::size_t next_switch = 0;
  int parity = path.initial_parity;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt_s;
    while (next_switch < path.switch_times.size() && path.switch_times[next_switch] <= t) {
      parity = -parity;
      ++next_switch;
    }
    const int plasmon = unit(eng) < p1 ? 1 : 0;
    int cluster = make_state(plasmon, parity);
    const bool swap = unit(eng) < model.mis_prob(parity);
    if (swap) cluster = (cluster + other(eng)) % kReadoutStates;
    const double theta = model.cluster_angles[cluster];
    tr.i_quad[k] = model.radius * std::cos(theta) + noise(eng);
    tr.q_quad[k] = model.radius * std::sin(theta) + noise(eng);
    tr.truth_parity[k] = static_cast<std::int8_t>(parity);
    tr.truth_plasmon[k] = static_cast<std::int8_t>(plasmon);
    tr.misassigned[k] = swap ? 1 : 0;
  }
  return tr;
}

std::vector<std::int8_t> emit_symbols(const ParityPath& path, double err_p, double err_m,
                                      double dt_s, double duration_s, std::uint64_t seed) {
  if (!(err_p >= 0.0 && err_p < 0.5) || !(err_m >= 0.0 && err_m < 0.5)) {
    throw ParameterError("symbol error probabilities must lie in [0, 0.5)");
  }
  if (!(dt_s > 0.0)) throw ParameterError("dt_s must be positive");
  const auto n = static_cast<std::size_t>(std::floor(duration_s / dt_s + 1e-9));
  if (n == 0) throw ParameterError("trace would be empty");
  Engine eng = make_engine(seed, "symbols");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::int8_t> out(n);
  std::size_t next_switch = 0;
  int parity = path.initial_parity;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt_s;
    while (next_switch < path.switch_times.size() && path.switch_times[next_switch] <= t) {
      parity = -parity;
      ++next_switch;
    }
    const bool flip = unit(eng) < (parity == 1 ? err_p : err_m);
    out[k] = static_cast<std::int8_t>(flip ? -parity : parity);
  }
  return out;
}

void write_trace_csv(std::ostream& os, const JumpTrace& tr, bool include_truth) {
  if (include_truth && !tr.has_truth()) throw ParameterError("trace has no truth columns");
  os << kTraceHeader;
  if (include_truth) os << kTraceTruthColumns;
  os << '\n';
  std::string line;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    line = fmt::format("{},{},{},{}", k, static_cast<double>(k) * tr.dt_s, tr.i_quad[k],
                       tr.q_quad[k]);
    if (include_truth) {
      line += fmt::format(",{},{}", static_cast<int>(tr.truth_parity[k]),
                          static_cast<int>(tr.truth_plasmon[k]));
    }
    os << line << '\n';
  }
}

JumpTrace read_trace_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ParameterError("trace CSV is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::string base = kTraceHeader;
  const bool truth = header == base + kTraceTruthColumns;
  if (!truth && header != base) throw ParameterError("unexpected trace CSV header: " + header);

  JumpTrace tr;
  std::vector<double> times;
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const std::size_t want = truth ? 6 : 4;
    if (cells.size() != want) {
      throw ParameterError(fmt::format("trace CSV row {} has {} columns, expected {}", row + 1,
                                       cells.size(), want));
    }
    try {
      times.push_back(std::stod(cells[1]));
      tr.i_quad.push_back(std::stod(cells[2]));
      tr.q_quad.push_back(std::stod(cells[3]));
      if (truth) {
        tr.truth_parity.push_back(static_cast<std::int8_t>(std::stoi(cells[4])));
        tr.truth_plasmon.push_back(static_cast<std::int8_t>(std::stoi(cells[5])));
      }
    } catch (const std::logic_error&) {
      throw ParameterError(fmt::format("trace CSV row {} is not numeric", row + 1));
    }
    ++row;
  }
  if (tr.i_quad.empty()) throw ParameterError("trace CSV has no samples");
  tr.dt_s = times.size() > 1 ? times[1] - times[0] : 0.0;
  if (!(tr.dt_s > 0.0)) throw ParameterError("trace CSV needs increasing time stamps");
  return tr;
}

Dataset simulate_experiment(const std::vector<PlanPoint>& plan, const DeviceParams& params,
                            const EnvConditions& env, const ReadoutModel& model,
                            std::uint64_t seed, const SimulationOptions& opt) {
  if (plan.empty()) throw ParameterError("experiment plan is empty");
  if (opt.n_traces < 1) throw ParameterError("n_traces must be at least 1");
  validate(params);
  validate(env);
  validate(model);
  const TunnelingModel tunneling(params, opt.ng);

  Dataset ds;
  ds.seed = seed;
  ds.options = opt;
  for (const PlanPoint& pt : plan) {
    if (!(pt.p1 >= 0.0 && pt.p1 <= 1.0)) throw ParameterError("plan p1 must lie in [0, 1]");
    EnvConditions e = env;
    e.temp_k = pt.temp_k;
    validate(e);
    PointTruth truth;
    truth.point = pt;
    truth.gamma0 = tunneling.state_rate(0, pt.temp_k, opt.method) + env.gamma_offset;
    truth.gamma1 = tunneling.state_rate(1, pt.temp_k, opt.method) + env.gamma_offset;
    truth.gamma2 = tunneling.state_rate(2, pt.temp_k, opt.method) + env.gamma_offset;
    truth.gamma = effective_rate(pt.p1, truth.gamma0, truth.gamma1, truth.gamma2,
                                 tunneling.ladder().frequency(1, 2), pt.temp_k);
    ds.points.push_back(truth);
  }

  ds.traces.assign(plan.size(), std::vector<JumpTrace>(opt.n_traces));
  const std::size_t total = plan.size() * static_cast<std::size_t>(opt.n_traces);
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t k = idx / opt.n_traces;
    const std::size_t j = idx % opt.n_traces;
    const PointTruth& truth = ds.points[k];
    const std::uint64_t path_seed = substream_seed(seed, "path", k, j);
    const std::uint64_t emit_seed = substream_seed(seed, "emit", k, j);
    const ParityPath path =
        simulate_parity_path(truth.gamma, truth.gamma, opt.duration_s, path_seed);
    JumpTrace tr = emit_readout(path, truth.point.p1, model, opt.dt_s, opt.duration_s, emit_seed);
    tr.meta = {truth.point.temp_k, truth.point.p1, truth.gamma, truth.gamma, emit_seed};
    ds.traces[k][j] = std::move(tr);
  });
  return ds;
}

}  // namespace qpscope
