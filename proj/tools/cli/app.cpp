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

#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "qpscope/error.hpp"
#include "qpscope/kinetics.hpp"
#include "qpscope/parallel.hpp"
#include "qpscope/parity_dynamics.hpp"
#include "qpscope/photon.hpp"
#include "qpscope/qp_distribution.hpp"
#include "qpscope/transmon.hpp"
#include "qpscope/units.hpp"

namespace qpscope::cli {

namespace {

using nlohmann::json;

std::vector<double> grid(double lo, double hi, double step) {
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = lo + step * k;
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = lo + (hi - lo) * k / (n - 1);
  return out;
}

double photon_g0(const RunConfig& cfg) {
  if (cfg.env.g0 > 0.0) return cfg.env.g0;
  if (cfg.env.gamma_offset > 0.0) {
    return calibrate_g0(cfg.env.gamma_offset, cfg.env.f0_ghz, cfg.device, cfg.ng());
  }
  return 0.0;
}

std::string trace_name(std::size_t point, std::size_t trace) {
  return fmt::format("traces/p{:03d}_t{:03d}.csv", point, trace);
}

json error_json(const std::string& kind, int code, const std::string& message) {
  return {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
}

}  // namespace

json to_json(const FitResult& fit) {
  json params = json::object();
  for (const FitParam& p : fit.params) params[p.name] = {{"value", p.value}, {"sigma", p.sigma}};
  return {{"parameters", params},
          {"residual_norm", fit.residual_norm},
          {"iterations", fit.iterations},
          {"starts", fit.starts},
          {"converged", fit.converged}};
}

std::vector<RatePoint> read_rate_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("rate table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "temp_k,gamma,sigma,state") {
    throw ParameterError("rate table header must be temp_k,gamma,sigma,state");
  }
  std::vector<RatePoint> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    RatePoint p;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream ls(line);
    if (!(ls >> p.temp_k >> c1 >> p.gamma >> c2 >> p.sigma >> c3 >> p.state) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      throw ParameterError(fmt::format("rate table row {} is malformed", row));
    }
    if (p.state != 0 && p.state != 1) {
      throw ParameterError(fmt::format("rate table row {}: state must be 0 or 1", row));
    }
    out.push_back(p);
  }
  return out;
}

std::string write_rate_table(const std::vector<RatePoint>& points) {
  std::string out = "temp_k,gamma,sigma,state\n";
  for (const RatePoint& p : points) {
    out += fmt::format("{},{},{},{}\n", p.temp_k, p.gamma, p.sigma, p.state);
  }
  return out;
}

void cmd_spectrum(const RunConfig& cfg, ArtifactWriter& w) {
  const DeviceParams& d = cfg.device;
  const double ng = cfg.ng();
  const auto levels = averaged_levels(d, ng, 5);
  const Spectrum plus = spectrum(d, ng, 1, 2);
  const Spectrum minus = spectrum(d, ng, -1, 2);
  json elements = json::array();
  for (auto [i, f] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}}) {
    const MatrixElements m = transition_matrix_elements(d, ng, i, f);
    const MatrixElements a = approx_matrix_elements(d.ej_ghz, d.ec_ghz, i, f);
    elements.push_back({{"i", i},
                        {"f", f},
                        {"cos2", m.cos2},
                        {"sin2", m.sin2},
                        {"approx_cos2", a.cos2},
                        {"approx_sin2", a.sin2}});
  }
  w.write_json("spectrum.json",
               {{"ng", ng},
                {"levels_ghz", levels},
                {"f01_ghz", levels[1]},
                {"f21_ghz", levels[2] - levels[1]},
                {"f32_ghz", levels[3] - levels[2]},
                {"f01_by_parity_ghz",
                 {{"plus", plus.levels[1] - plus.levels[0]},
                  {"minus", minus.levels[1] - minus.levels[0]}}},
                {"charge_dispersion_ghz", charge_dispersion(d)},
                {"matrix_elements", elements}});

  const auto ngs = grid(0.0, 1.0, 0.01);
  std::vector<std::string> rows(ngs.size());
  parallel_for(ngs.size(), [&](std::size_t k) {
    const Spectrum p = spectrum(d, ngs[k], 1, 2);
    const Spectrum m = spectrum(d, ngs[k], -1, 2);
    const double fp = p.levels[1] - p.levels[0];
    const double fm = m.levels[1] - m.levels[0];
    rows[k] = fmt::format("{},{},{},{}\n", ngs[k], fp, fm, 0.5 * (fp + fm));
  });
  std::string csv = "ng,f01_plus_ghz,f01_minus_ghz,f01_avg_ghz\n";
  for (const auto& r : rows) csv += r;
  w.write("dispersion.csv", csv);
}

void cmd_rates(const RunConfig& cfg, ArtifactWriter& w) {
  const DeviceParams& d = cfg.device;
  const TunnelingModel model(d, cfg.ng());
  const RateMethod method = cfg.method();
  const double offset = cfg.env.gamma_offset;
  const double f_q = model.ladder().frequency(0, 1);
  const double f21 = model.ladder().frequency(1, 2);
  const bool activation = d.ddelta_ghz > f_q;
  PhotonEnv ph{cfg.env.f0_ghz, photon_g0(cfg)};
  const double ph0 = photon_state_rate(0, ph, d, model.ladder(), cfg.photon_elements);
  const double ph1 = photon_state_rate(1, ph, d, model.ladder(), cfg.photon_elements);

  const auto temps = grid(cfg.sweep.t_min_k, cfg.sweep.t_max_k, cfg.sweep.t_step_k);
  std::vector<std::string> rows(temps.size());
  parallel_for(temps.size(), [&](std::size_t k) {
    const double t = temps[k];
    const RateBundle b = model.rates(t, method);
    const double g0 = b.gamma0 + offset;
    const double g1 = b.gamma1 + offset;
    const double g2 = b.gamma2 + offset;
    const double w21 = safe_exp(-f21 / kelvin_to_ghz(t));
    const double eff = (g1 + w21 * g2) / (1.0 + w21);
    const double a0 = activation ? approx_state_rate(0, d, t, cfg.ng()) : NAN;
    const double a1 = activation ? approx_state_rate(1, d, t, cfg.ng()) : NAN;
    rows[k] = fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", t, to_string(b.method),
                          xqp_total(d, t), b.gamma0, b.gamma1, b.gamma2, g0, g1, g2, eff, g1 / g0,
                          a0, a1, ph0, ph1);
  });
  std::string csv =
      "temp_k,method,xqp,gamma0_qp,gamma1_qp,gamma2_qp,gamma0,gamma1,gamma2,gamma1_eff,ratio,"
      "gamma0_activation,gamma1_activation,gamma0_photon,gamma1_photon\n";
  for (const auto& r : rows) csv += r;
  w.write("rates.csv", csv);

  json summary = {{"temp_k", cfg.env.temp_k},
                  {"f_q_ghz", f_q},
                  {"f21_ghz", f21},
                  {"method", to_string(model.resolve(method))},
                  {"gamma_offset", offset}};
  {
    const double t = cfg.env.temp_k;
    const RateBundle b = model.rates(t, method);
    summary["gamma0"] = b.gamma0 + offset;
    summary["gamma1"] = b.gamma1 + offset;
    summary["gamma2"] = b.gamma2 + offset;
    summary["ratio"] = (b.gamma1 + offset) / (b.gamma0 + offset);
    summary["no_gap_ratio"] = no_gap_ratio(d, t, cfg.ng());
    summary["gamma2_weight"] = gamma2_weight(f21, t);
    summary["photon"] = {{"f0_ghz", ph.f0_ghz},
                         {"g0", ph.g0},
                         {"elements", to_string(cfg.photon_elements)},
                         {"gamma0", ph0},
                         {"gamma1", ph1},
                         {"ratio", photon_ratio(ph, d, cfg.ng())}};
  }

  const auto window = linspace(cfg.sweep.arrhenius_min_k, cfg.sweep.arrhenius_max_k, 7);
  std::vector<double> g0s, g1s;
  for (double t : window) {
    g0s.push_back(model.state_rate(0, t, method) + offset);
    g1s.push_back(model.state_rate(1, t, method) + offset);
  }
  const ArrheniusFit a0 = arrhenius_fit(window, g0s, offset);
  const ArrheniusFit a1 = arrhenius_fit(window, g1s, offset);
  summary["arrhenius"] = {{"temps_k", window},
                          {"ea0_ghz", a0.ea_ghz},
                          {"ea0_sigma", a0.ea_sigma},
                          {"ea1_ghz", a1.ea_ghz},
                          {"ea1_sigma", a1.ea_sigma},
                          {"difference_ghz", a0.ea_ghz - a1.ea_ghz}};
  w.write_json("rates_summary.json", summary);
}

void cmd_pump(const RunConfig& cfg, ArtifactWriter& w) {
  if (!(cfg.env.gamma_offset > 0.0)) {
    throw ParameterError("pump needs env.gamma_offset > 0 as the ground-state flip rate");
  }
  PumpConfig pc;
  pc.gamma0 = cfg.env.gamma_offset;
  pc.gamma1 = cfg.pump.ratio * cfg.env.gamma_offset;
  pc.t1_s = cfg.pump.t1_s;
  std::string csv =
      "p_e,closed_form,minus_population_drive_plus,minus_population_drive_minus,"
      "ground_minus_drive_plus\n";
  for (double p_e : linspace(0.0, cfg.pump.p_e_max, cfg.pump.points)) {
    pc.p_e_conditional = p_e;
    pc.drive_parity = 1;
    const double minus_plus = 1.0 - driven_parity_population(pc);
    const double ground_minus = ground_minus_population(pc);
    pc.drive_parity = -1;
    const double minus_minus = driven_parity_population(pc);
    csv += fmt::format("{},{},{},{},{}\n", p_e, pump_polarization(cfg.pump.ratio, p_e),
                       minus_plus, minus_minus, ground_minus);
  }
  w.write("pump.csv", csv);
}

void cmd_kinetics(const RunConfig& cfg, ArtifactWriter& w) {
  const DeviceParams& d = cfg.device;
  const double t = cfg.env.temp_k;
  const TunnelingModel model(d, cfg.ng());
  const DirectionalRates dr = directional_rates(model, t, cfg.method());
  const double bound_ncp = n_cp_for_gamma_bound(dr, d, t, 1.0);
  DeviceParams at_bound = d;
  at_bound.n_cp = bound_ncp;

  std::vector<double> trapping = {1.0, 3.0, 10.0, 100.0};
  if (std::find(trapping.begin(), trapping.end(), cfg.kinetics.s) == trapping.end()) {
    trapping.push_back(cfg.kinetics.s);
  }
  std::string csv = "s,p1,gamma,chord,deviation\n";
  json devs = json::array();
  for (double s : trapping) {
    KineticsParams kin = cfg.kinetics;
    kin.s = s;
    const double g0 = kinetic_parity_rate(0.0, kin, dr, d, t);
    const double g1 = kinetic_parity_rate(1.0, kin, dr, d, t);
    for (double p1 : grid(0.0, 1.0, 0.02)) {
      const double g = kinetic_parity_rate(p1, kin, dr, d, t);
      const double chord = g0 + p1 * (g1 - g0);
      csv += fmt::format("{},{},{},{},{}\n", s, p1, g, chord, (g - chord) / chord);
    }
    devs.push_back({{"s", s},
                    {"deviation", linearity_deviation(kin, dr, d, t)},
                    {"deviation_at_gamma_bound", linearity_deviation(kin, dr, at_bound, t)}});
  }
  w.write("kinetics.csv", csv);

  json summary = {{"temp_k", t},
                  {"n_cp", d.n_cp},
                  {"directional_rates",
                   {{"gamma0_lr", dr.g0_lr},
                    {"gamma0_rl", dr.g0_rl},
                    {"gamma1_lr", dr.g1_lr},
                    {"gamma1_rl", dr.g1_rl}}},
                  {"per_qp_rate",
                   {{"lr_p0", per_qp_rate(Direction::left_to_right, 0.0, dr, d, t)},
                    {"rl_p0", per_qp_rate(Direction::right_to_left, 0.0, dr, d, t)},
                    {"lr_p1", per_qp_rate(Direction::left_to_right, 1.0, dr, d, t)},
                    {"rl_p1", per_qp_rate(Direction::right_to_left, 1.0, dr, d, t)}}},
                  {"n_cp_for_unit_gamma", bound_ncp},
                  {"linearity", devs}};
  if (cfg.kinetics.g > 0.0) {
    const double lr = per_qp_rate(Direction::left_to_right, 0.0, dr, d, t);
    const double rl = per_qp_rate(Direction::right_to_left, 0.0, dr, d, t);
    const Densities x = steady_densities(cfg.kinetics, lr, rl);
    summary["steady_densities_p0"] = {{"x_l", x.x_l}, {"x_r", x.x_r}};
  }
  w.write_json("kinetics.json", summary);
}

void cmd_simulate(const RunConfig& cfg, ArtifactWriter& w) {
  const auto plan = cfg.plan.points();
  const Dataset ds =
      simulate_experiment(plan, cfg.device, cfg.env, cfg.readout, cfg.seed, cfg.simulation);
  std::vector<std::string> texts(plan.size() * ds.options.n_traces);
  parallel_for(texts.size(), [&](std::size_t idx) {
    const std::size_t k = idx / ds.options.n_traces;
    const std::size_t j = idx % ds.options.n_traces;
    std::ostringstream os;
    write_trace_csv(os, ds.traces[k][j], true);
    texts[idx] = os.str();
  });
  json points = json::array();
  for (std::size_t k = 0; k < plan.size(); ++k) {
    json files = json::array();
    for (int j = 0; j < ds.options.n_traces; ++j) {
      const std::string name = trace_name(k, j);
      w.write(name, texts[k * ds.options.n_traces + j]);
      files.push_back(name);
    }
    const PointTruth& t = ds.points[k];
    points.push_back({{"temp_k", t.point.temp_k},
                      {"p1", t.point.p1},
                      {"gamma0", t.gamma0},
                      {"gamma1", t.gamma1},
                      {"gamma2", t.gamma2},
                      {"gamma", t.gamma},
                      {"traces", files}});
  }
  json doc = to_json(cfg);
  doc.erase("output_dir");
  w.write_json("dataset.json", {{"seed", cfg.seed},
                                {"dt_s", cfg.simulation.dt_s},
                                {"config", doc},
                                {"points", points}});
}

void cmd_analyze(const RunConfig& cfg, const std::filesystem::path& dir, ArtifactWriter& w) {
  const std::string meta_text = read_file(dir / "dataset.json");
  w.add_input("dataset.json", meta_text);
  json meta;
  try {
    meta = json::parse(meta_text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("dataset.json is not valid JSON: ") + e.what());
  }
  if (!meta.contains("points") || !meta["points"].is_array() || meta["points"].empty()) {
    throw ParameterError("dataset.json has no points");
  }
  std::vector<PlanPoint> plan;
  std::vector<std::vector<std::string>> files;
  for (const json& p : meta["points"]) {
    plan.push_back({p.at("temp_k").get<double>(), p.at("p1").get<double>()});
    files.push_back(p.at("traces").get<std::vector<std::string>>());
  }
  std::vector<std::vector<JumpTrace>> traces(plan.size());
  for (std::size_t k = 0; k < plan.size(); ++k) {
    for (const std::string& f : files[k]) {
      const std::string text = read_file(dir / f);
      w.add_input(f, text);
      std::istringstream is(text);
      traces[k].push_back(read_trace_csv(is));
    }
  }

  PipelineOptions opt;
  opt.readout = cfg.readout;
  opt.gmm_components = cfg.analysis.gmm_components;
  opt.gmm_max_points = cfg.analysis.gmm_max_points;
  opt.seed = cfg.seed;
  opt.joint.base = cfg.device;
  opt.joint.ng = cfg.ng();
  opt.joint.method = cfg.method();
  const PipelineResult res = analyze_dataset(traces, plan, opt);

  json points = json::array();
  for (std::size_t k = 0; k < res.points.size(); ++k) {
    const PointEstimate& e = res.points[k];
    json row = {{"temp_k", e.point.temp_k},
                {"p1", e.point.p1},
                {"p1_est", e.p1_est},
                {"p1_raw", e.p1_raw},
                {"gamma", e.gamma},
                {"sigma", e.sigma},
                {"gamma_pm", e.gamma_pm},
                {"gamma_mp", e.gamma_mp},
                {"err_p", e.err_p},
                {"err_m", e.err_m},
                {"loglik", e.loglik}};
    const json& src = meta["points"][k];
    if (src.contains("gamma")) row["gamma_truth"] = src["gamma"];
    points.push_back(row);
  }
  json temps = json::array();
  for (const TemperatureRates& t : res.temperatures) {
    temps.push_back({{"temp_k", t.temp_k},
                     {"gamma0", t.fit.gamma0},
                     {"sigma0", t.fit.sigma0},
                     {"gamma1", t.fit.gamma1},
                     {"sigma1", t.fit.sigma1},
                     {"chi2", t.fit.chi2},
                     {"dof", t.fit.dof},
                     {"curvature", t.fit.curvature},
                     {"curvature_sigma", t.fit.curvature_sigma}});
  }
  json doc = {{"points", points}, {"temperatures", temps}};
  if (res.has_joint_fit) {
    doc["joint_fit"] = to_json(res.joint);
    const DeviceParams& d = cfg.device;
    doc["closure"] = {
        {"ddelta_rel_error", res.joint.get("ddelta_ghz").value / d.ddelta_ghz - 1.0},
        {"ln_x_res_error", res.joint.get("ln_x_res").value - std::log(d.x_res)},
        {"delta_rel_error", res.joint.get("delta_ghz").value / d.delta_ghz - 1.0},
        {"gamma_offset_rel_error",
         cfg.env.gamma_offset > 0.0
             ? json(res.joint.get("gamma_offset").value / cfg.env.gamma_offset - 1.0)
             : json(nullptr)}};
  }
  w.write_json("analysis.json", doc);
  w.write("rate_table.csv", write_rate_table(res.rate_points));
}

void cmd_fit(const RunConfig& cfg, const std::filesystem::path& table, ArtifactWriter& w) {
  const std::string text = read_file(table);
  w.add_input("rate_table", text);
  JointFitOptions opt;
  opt.base = cfg.device;
  opt.ng = cfg.ng();
  opt.method = cfg.method();
  const FitResult fit = joint_fit(read_rate_table(text), opt);
  w.write_json("fit.json", to_json(fit));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const ReproduceHook& reproduce) {
  CLI::App app{"Parity-switching analysis for gap-asymmetric transmons", "qpscope"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string method;
  std::string input;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Root seed, overrides the config");
  app.add_option("--out", out_dir, "Output directory, overrides the config");
  app.add_option("--method", method, "Rate method: numeric, bessel or approx")
      ->check(CLI::IsMember({"numeric", "bessel", "approx", "auto", "automatic"}));

  struct Entry {
    const char* name;
    const char* help;
    bool needs_input;
  };
  const Entry entries[] = {
      {"spectrum", "Transmon levels, dispersion and matrix elements", false},
      {"rates", "Parity rates versus temperature", false},
      {"pump", "Parity pumping versus drive", false},
      {"kinetics", "Non-equilibrium pad densities and linearity", false},
      {"simulate", "Synthetic jump-trace dataset", false},
      {"analyze", "Full pipeline on a dataset directory (--input)", true},
      {"fit", "Joint model fit of a temp_k,gamma,sigma,state table (--input)", true},
      {"reproduce-all", "Acceptance suite", false},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->fallthrough();
    if (e.needs_input) sub->add_option("--input", input, "Input path")->required();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  }

  Invocation inv;
  inv.subcommand = app.get_subcommands().front()->get_name();
  try {
    inv.config = config_path.empty() ? default_config() : parse_config_file(config_path);
    if (seed) inv.config.seed = *seed;
    if (!out_dir.empty()) inv.config.output_dir = out_dir;
    if (!method.empty()) inv.config.simulation.method = rate_method_from_string(method);
    inv.out_dir = inv.config.output_dir;
    if (!input.empty()) inv.input = input;

    ArtifactWriter w(inv.out_dir);
    json canonical = to_json(inv.config);
    canonical.erase("output_dir");
    w.add_input("config", canonical.dump());
    int status = kExitOk;
    const RunConfig& cfg = inv.config;
    if (inv.subcommand == "spectrum") {
      cmd_spectrum(cfg, w);
    } else if (inv.subcommand == "rates") {
      cmd_rates(cfg, w);
    } else if (inv.subcommand == "pump") {
      cmd_pump(cfg, w);
    } else if (inv.subcommand == "kinetics") {
      cmd_kinetics(cfg, w);
    } else if (inv.subcommand == "simulate") {
      cmd_simulate(cfg, w);
    } else if (inv.subcommand == "analyze") {
      cmd_analyze(cfg, *inv.input, w);
    } else if (inv.subcommand == "fit") {
      cmd_fit(cfg, *inv.input, w);
    } else if (inv.subcommand == "reproduce-all") {
      if (!reproduce) throw ParameterError("reproduce-all is not available in this build");
      status = reproduce(inv, w, out);
    }
    w.write_manifest(inv.subcommand, cfg.seed, to_string(cfg.method()));
    out << fmt::format("{}: wrote {}\n", inv.subcommand, inv.out_dir.string());
    return status;
  } catch (const ParameterError& e) {
    err << error_json("config", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << error_json("numeric", kExitNumeric, e.what()).dump() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_json("io", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << error_json("numeric", kExitNumeric, e.what()).dump() << '\n';
    return kExitNumeric;
  }
}

}  // namespace qpscope::cli
