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

#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <random>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "qpscope/device.hpp"
#include "qpscope/gmm.hpp"
#include "qpscope/hmm.hpp"
#include "qpscope/inference.hpp"
#include "qpscope/kinetics.hpp"
#include "qpscope/parity_dynamics.hpp"
#include "qpscope/photon.hpp"
#include "qpscope/qp_distribution.hpp"
#include "qpscope/rng.hpp"
#include "qpscope/trace_sim.hpp"
#include "qpscope/transmon.hpp"
#include "qpscope/tunneling.hpp"
#include "qpscope/units.hpp"

namespace qpscope::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

// Reference values quoted for the measured device.
constexpr double kRefGamma1 = 4.76;
constexpr double kRefGamma0 = 0.14;
constexpr double kRefRatio = 34.0;
constexpr double kRefQubitGhz = 3.826;
constexpr double kRefDispersionGhz = 0.010;
constexpr double kRefPhotonRatio = 2.2;
constexpr double kRefPumpRatio = 37.0;
constexpr double kRefT1 = 193e-6;

class Recorder {
 public:
  Recorder(int id, std::string title) : start_(Clock::now()) {
    r_.id = id;
    r_.title = std::move(title);
    r_.passed = true;
  }
  void check(bool ok, const std::string& text) {
    r_.checks.push_back((ok ? "ok " : "FAIL ") + text);
    r_.passed = r_.passed && ok;
  }
  CriterionResult finish() {
    r_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return r_;
  }
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  CriterionResult r_;
  Clock::time_point start_;
};

bool within_rel(double value, double ref, double tol) {
  return std::abs(value - ref) <= tol * std::abs(ref);
}

}  // namespace

CriterionResult rate_reproduction(const Options&) {
  Recorder rec(1, "rate reproduction at 20 mK");
  const DeviceParams d = reference_device();
  const EnvConditions env = reference_environment();
  const auto t0 = Clock::now();
  const TunnelingModel model(d, kDefaultNg);
  const RateBundle b = model.rates(env.temp_k, RateMethod::automatic);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const double g0 = b.gamma0 + env.gamma_offset;
  const double g1 = b.gamma1 + env.gamma_offset;
  rec.check(within_rel(g1, kRefGamma1, 0.25),
            fmt::format("gamma1 = {:.4g} s^-1 vs {} within 25%", g1, kRefGamma1));
  rec.check(within_rel(g0, kRefGamma0, 0.05),
            fmt::format("gamma0 = {:.4g} s^-1 vs {} within 5%", g0, kRefGamma0));
  rec.check(g1 / g0 >= 25.0 && g1 / g0 <= 45.0,
            fmt::format("ratio = {:.3g} in [25, 45] (reference ~{})", g1 / g0, kRefRatio));
  rec.check(secs < 1.0, fmt::format("runtime {:.3f} s < 1 s", secs));
  return rec.finish();
}

CriterionResult method_equivalence(const Options&) {
  Recorder rec(2, "numeric vs Bessel structure factors within 2%");
  const DeviceParams d = reference_device();
  const double f_q = qubit_frequency(d, kDefaultNg);
  double worst = 0.0;
  std::string where;
  for (double t : {0.020, 0.030, 0.040, 0.050, 0.060}) {
    for (double f : {-f_q, 0.0, f_q}) {
      for (Direction dir : {Direction::left_to_right, Direction::right_to_left}) {
        for (int sign : {1, -1}) {
          const double n = structure_factor(dir, sign, f, d, t, RateMethod::numeric);
          const double b = structure_factor(dir, sign, f, d, t, RateMethod::bessel);
          const double rel = std::abs(n - b) / std::abs(b);
          if (rel > worst) {
            worst = rel;
            where = fmt::format("T={} K f={:+.3f} {} S{}", t, f, to_string(dir),
                                sign > 0 ? "+" : "-");
          }
        }
      }
    }
  }
  rec.check(worst <= 0.02, fmt::format("max relative difference {:.4f} at {}", worst, where));
  const double secs = rec.elapsed();
  rec.check(secs < 10.0, fmt::format("runtime {:.2f} s < 10 s", secs));
  return rec.finish();
}

CriterionResult activation_energies(const Options&) {
  Recorder rec(3, "Arrhenius activation-energy difference near f_q");
  const DeviceParams d = reference_device();
  const EnvConditions env = reference_environment();
  const TunnelingModel model(d, kDefaultNg);
  std::vector<double> temps, g0, g1;
  for (int k = 0; k < 7; ++k) {
    const double t = 0.035 + 0.010 * k;
    temps.push_back(t);
    g0.push_back(model.state_rate(0, t, RateMethod::automatic) + env.gamma_offset);
    g1.push_back(model.state_rate(1, t, RateMethod::automatic) + env.gamma_offset);
  }
  const ArrheniusFit a0 = arrhenius_fit(temps, g0, env.gamma_offset);
  const ArrheniusFit a1 = arrhenius_fit(temps, g1, env.gamma_offset);
  const double f_q = model.ladder().frequency(0, 1);
  const double diff = a0.ea_ghz - a1.ea_ghz;
  rec.check(std::abs(diff - f_q) <= 0.5,
            fmt::format("E_A0 - E_A1 = {:.3f} GHz vs f_q = {:.3f} GHz within 0.5 (E_A0 {:.3f}, "
                        "E_A1 {:.3f})",
                        diff, f_q, a0.ea_ghz, a1.ea_ghz));
  return rec.finish();
}

CriterionResult transmon_numbers(const Options&) {
  Recorder rec(4, "transmon frequency and charge dispersion");
  const DeviceParams d = reference_device();
  const double f01 = qubit_frequency(d, kDefaultNg);
  const double disp = charge_dispersion(d);
  rec.check(std::abs(f01 - kRefQubitGhz) <= 0.020,
            fmt::format("f01 = {:.5f} GHz vs {} within 20 MHz", f01, kRefQubitGhz));
  rec.check(disp >= 0.5 * kRefDispersionGhz && disp <= 2.0 * kRefDispersionGhz,
            fmt::format("dispersion = {:.2f} MHz within a factor 2 of 10 MHz", disp * 1e3));
  return rec.finish();
}

CriterionResult no_gap_ratio_check(const Options&) {
  Recorder rec(5, "ratio without a gap difference");
  const DeviceParams d = reference_device();
  const double r = no_gap_ratio(d, 0.020, kDefaultNg);
  rec.check(std::abs(r - 5.5) <= 1.0, fmt::format("no-gap ratio = {:.3f} in 5.5 +- 1", r));
  rec.check(kRefRatio / r >= 5.0,
            fmt::format("measured ratio {} exceeds it by {:.2f}x >= 5x", kRefRatio, kRefRatio / r));
  return rec.finish();
}

CriterionResult photon_channel(const Options&) {
  Recorder rec(6, "photon-assisted channel");
  const DeviceParams d = reference_device();
  const EnvConditions env = reference_environment();
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k <= 50; ++k) {
    const PhotonEnv pe{7.0 + 5.0 * k / 50.0, 1.0};
    const double r = photon_ratio(pe, d, kDefaultNg);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  rec.check(lo <= kRefPhotonRatio && kRefPhotonRatio <= hi,
            fmt::format("photon ratio over f0 in [7, 12] GHz spans [{:.4f}, {:.4f}], must contain "
                        "{}",
                        lo, hi, kRefPhotonRatio));
  const TunnelingModel model(d, kDefaultNg);
  const PhotonEnv pe{env.f0_ghz, calibrate_g0(env.gamma_offset, env.f0_ghz, d, kDefaultNg)};
  const double ph1 = photon_state_rate(1, pe, d, kDefaultNg);
  const double g1 = model.state_rate(1, env.temp_k, RateMethod::automatic) + env.gamma_offset;
  rec.check(ph1 <= 0.06 * g1,
            fmt::format("photon gamma1 = {:.4g} s^-1 is {:.2f}% of gamma1 = {:.4g} (<= 6%)", ph1,
                        100.0 * ph1 / g1, g1));
  return rec.finish();
}

CriterionResult parity_pumping(const Options& opt) {
  Recorder rec(7, "parity pumping");
  const double p0 = pump_polarization(kRefPumpRatio, 0.0);
  const double p5 = pump_polarization(kRefPumpRatio, 0.5);
  rec.check(std::abs(p0 - 0.5) <= 1e-12 && std::abs(p5 - 0.05) <= 1e-12,
            fmt::format("closed form at p_e = 0, 0.5: {:.6f}, {:.6f}", p0, p5));

  PumpConfig cfg;
  cfg.gamma0 = kRefGamma0;
  cfg.gamma1 = kRefPumpRatio * kRefGamma0;
  cfg.t1_s = kRefT1;
  double worst = 0.0;
  std::vector<double> pe, pm;
  std::mt19937_64 eng = make_engine(opt.seed, "pump-noise");
  std::normal_distribution<double> noise(0.0, 0.02);
  for (int k = 0; k <= 10; ++k) {
    cfg.p_e_conditional = 0.05 * k;
    const double master = driven_parity_population(cfg);
    const double closed = pump_polarization(kRefPumpRatio, cfg.p_e_conditional);
    worst = std::max(worst, std::abs(master - closed) / closed);
    pe.push_back(cfg.p_e_conditional);
    pm.push_back(master * (1.0 + noise(eng)));
  }
  rec.check(worst <= 0.10,
            fmt::format("master equation vs closed form: max relative gap {:.4f} (<= 10%)", worst));
  const PumpFit fit = fit_pump_ratio(pe, pm);
  rec.check(std::abs(fit.ratio - kRefPumpRatio) <= 2.0,
            fmt::format("fit with 2% noise: ratio = {:.3f} +- {:.3f}, target 37 +- 2", fit.ratio,
                        fit.sigma));
  return rec.finish();
}

CriterionResult kinetics(const Options&) {
  Recorder rec(8, "non-equilibrium kinetics");
  const DeviceParams d = reference_device();
  const double t = reference_environment().temp_k;
  const TunnelingModel model(d, kDefaultNg);
  const DirectionalRates dr = directional_rates(model, t, RateMethod::automatic);
  DeviceParams bound = d;
  bound.n_cp = n_cp_for_gamma_bound(dr, d, t, 1.0);

  KineticsParams kin;
  kin.s = 10.0;
  const double dev10 = linearity_deviation(kin, dr, bound, t);
  rec.check(dev10 < 0.05,
            fmt::format("s = 10, per-QP rate at the bound 1 s^-1 (n_cp = {:.4g}): deviation "
                        "{:.2f}% < 5%",
                        bound.n_cp, 100.0 * dev10));

  std::vector<double> devs;
  for (double s : {100.0, 10.0, 3.0, 1.0}) {
    kin.s = s;
    devs.push_back(linearity_deviation(kin, dr, bound, t));
  }
  const bool monotone = std::is_sorted(devs.begin(), devs.end()) &&
                        std::adjacent_find(devs.begin(), devs.end()) == devs.end();
  rec.check(monotone, fmt::format("deviation for s = 100, 10, 3, 1: {:.4f}, {:.4f}, {:.4f}, {:.4f}",
                                  devs[0], devs[1], devs[2], devs[3]));

  // Steady densities against direct integration of the rate equations.
  double worst = 0.0;
  for (double p1 : {0.0, 0.3, 1.0}) {
    KineticsParams k;
    k.s = 10.0;
    k.r = 0.0;
    k.g = k.s * xqp_total(d, t);
    const double lr = per_qp_rate(Direction::left_to_right, p1, dr, bound, t);
    const double rl = per_qp_rate(Direction::right_to_left, p1, dr, bound, t);
    const Densities want = steady_densities(k, lr, rl);
    using State = std::array<double, 2>;
    State x{0.0, 0.0};
    auto rhs = [&](const State& y, State& dy, double) {
      const auto v = kinetic_rhs(k, lr, rl, {y[0], y[1]});
      dy = {v[0], v[1]};
    };
    boost::numeric::odeint::integrate_adaptive(
        boost::numeric::odeint::make_controlled<
            boost::numeric::odeint::runge_kutta_dopri5<State>>(1e-14, 1e-12),
        rhs, x, 0.0, 5.0, 1e-3);
    worst = std::max({worst, std::abs(x[0] / want.x_l - 1.0), std::abs(x[1] / want.x_r - 1.0)});
  }
  rec.check(worst <= 1e-3, fmt::format("steady densities vs ODE: max relative gap {:.2e}", worst));
  rec.check(bound.n_cp < d.n_cp,
            fmt::format("default n_cp = {:.3g} keeps the per-QP rate below the bound; deviation "
                        "there {:.3f}%",
                        d.n_cp, 100.0 * linearity_deviation(KineticsParams{}, dr, d, t)));
  return rec.finish();
}

CriterionResult pipeline_closure(const Options& opt) {
  Recorder rec(9, "pipeline closure on synthetic data");
  const DeviceParams d = reference_device();
  const EnvConditions env = reference_environment();

  // HMM on 100 x 30 s symbol traces at the base-temperature rate.
  {
    const double gamma = kRefGamma0;
    std::vector<Symbols> seqs(100);
    double switches = 0.0;
    for (std::size_t j = 0; j < seqs.size(); ++j) {
      const ParityPath path =
          simulate_parity_path(gamma, gamma, 30.0, substream_seed(opt.seed, "c9-path", j));
      switches += static_cast<double>(path.switch_times.size());
      seqs[j] = emit_symbols(path, 0.05, 0.01, 2e-3, 30.0, substream_seed(opt.seed, "c9-sym", j));
    }
    const HmmFit h = fit_parity_hmm(seqs, 2e-3);
    const double sigma = gamma / std::sqrt(std::max(switches, 1.0));
    rec.check(std::abs(h.gamma() - gamma) <= 3.0 * sigma,
              fmt::format("HMM gamma = {:.4f} vs {} within 3 sigma = {:.4f} ({} switches)",
                          h.gamma(), gamma, 3.0 * sigma, switches));
  }
  // Mixture on clean four-cluster data at radius / sigma = 4.
  {
    ReadoutModel clean;
    clean.mis_prob_plus = 0.0;
    clean.mis_prob_minus = 0.0;
    Points2 pts;
    for (std::uint64_t j = 0; j < 4; ++j) {
      const ParityPath path =
          simulate_parity_path(0.5, 0.5, 30.0, substream_seed(opt.seed, "c9-gmm-path", j));
      const JumpTrace tr =
          emit_readout(path, 0.3, clean, 2e-3, 30.0, substream_seed(opt.seed, "c9-gmm-emit", j));
      const Points2 p = trace_points(tr);
      pts.insert(pts.end(), p.begin(), p.end());
    }
    MixtureFit fit = fit_gmm(pts, 5, substream_seed(opt.seed, "c9-gmm"));
    label_mixture(fit, clean);
    refine_states(fit, pts, clean);
    rec.check(std::abs(fit.p1_est - 0.3) <= 0.02,
              fmt::format("GMM p1 = {:.4f} vs 0.3 within 0.02", fit.p1_est));
  }
  // Full simulate -> analyze -> joint fit.
  {
    std::vector<PlanPoint> plan;
    for (double t : {0.020, 0.035, 0.050, 0.065, 0.080, 0.095}) {
      for (double p1 : {0.0, 0.1, 0.2, 0.3, 0.4}) plan.push_back({t, p1});
    }
    const ReadoutModel readout;
    const Dataset ds = simulate_experiment(plan, d, env, readout, opt.seed);
    PipelineOptions po;
    po.readout = readout;
    po.seed = opt.seed;
    po.joint.base = d;
    const PipelineResult res = analyze_dataset(ds.traces, plan, po);
    const double dd = res.joint.get("ddelta_ghz").value;
    const double lnx = res.joint.get("ln_x_res").value;
    const double off = res.joint.get("gamma_offset").value;
    rec.check(within_rel(dd, d.ddelta_ghz, 0.05),
              fmt::format("dDelta = {:.4f} GHz vs {} within 5%", dd, d.ddelta_ghz));
    rec.check(std::abs(lnx - std::log(d.x_res)) <= 0.3,
              fmt::format("ln x_res = {:.4f} vs {:.4f} within 0.3", lnx, std::log(d.x_res)));
    rec.check(true, fmt::format("Gamma_offset = {:.4f} vs {} ({:+.1f}%)", off, env.gamma_offset,
                                100.0 * (off / env.gamma_offset - 1.0)));
  }
  const double secs = rec.elapsed();
  rec.check(secs < 300.0, fmt::format("runtime {:.1f} s < 300 s", secs));
  return rec.finish();
}

namespace {

std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[std::filesystem::relative(e.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

}  // namespace

CriterionResult determinism(const Options& opt) {
  Recorder rec(10, "byte-identical CLI artifacts");
  if (!opt.cli) {
    rec.check(false, "no CLI runner supplied");
    return rec.finish();
  }
  namespace fs = std::filesystem;
  const fs::path base = opt.work_dir / "determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path config = base / "config.json";
  {
    std::ofstream out(config);
    out << R"({
  "device": {"ej_ghz": 6.24, "ec_ghz": 0.357, "delta_ghz": 46.0, "ddelta_ghz": 4.52,
             "x_res": 5.6e-10},
  "env": {"temp_k": 0.02, "gamma_offset": 0.14},
  "plan": {"temperatures_k": [0.035, 0.065, 0.095], "p1": [0.0, 0.2, 0.4]},
  "simulation": {"n_traces": 2, "duration_s": 20.0, "dt_s": 0.002},
  "sweep": {"t_min_k": 0.02, "t_max_k": 0.1, "t_step_k": 0.01},
  "seed": )" << opt.seed
        << "\n}\n";
  }
  const std::string seed = std::to_string(opt.seed);
  for (int run = 0; run < 2; ++run) {
    const fs::path root = base / ("run" + std::to_string(run));
    auto call = [&](const std::string& sub, const fs::path& out,
                    std::vector<std::string> extra = {}) {
      std::vector<std::string> args = {sub, "--config", config.string(), "--seed", seed, "--out",
                                       out.string()};
      args.insert(args.end(), extra.begin(), extra.end());
      const int code = opt.cli(args);
      rec.check(code == 0, fmt::format("run {} {} exit {}", run + 1, sub, code));
    };
    for (const char* sub : {"spectrum", "rates", "pump", "kinetics", "simulate"}) {
      call(sub, root / sub);
    }
    call("analyze", root / "analyze", {"--input", (root / "simulate").string()});
    call("fit", root / "fit", {"--input", (root / "analyze" / "rate_table.csv").string()});
  }
  const auto a = snapshot(base / "run0");
  const auto b = snapshot(base / "run1");
  std::size_t differing = 0;
  std::string first;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      if (differing++ == 0) first = name;
    }
  }
  const bool same = differing == 0 && a.size() == b.size() && !a.empty();
  rec.check(same, same ? fmt::format("{} artifacts identical across two runs", a.size())
                       : fmt::format("{} of {} artifacts differ, first {}", differing, a.size(),
                                     first));
  return rec.finish();
}

std::vector<CriterionResult> run_all(const Options& opt,
                                     const std::function<void(const CriterionResult&)>& on_result) {
  using Fn = CriterionResult (*)(const Options&);
  const Fn all[] = {rate_reproduction, method_equivalence, activation_energies, transmon_numbers,
                    no_gap_ratio_check, photon_channel,    parity_pumping,      kinetics,
                    pipeline_closure,  determinism};
  std::vector<CriterionResult> out;
  for (Fn f : all) {
    CriterionResult r;
    try {
      r = f(opt);
    } catch (const std::exception& e) {
      r.id = static_cast<int>(out.size()) + 1;
      r.title = "raised an exception";
      r.passed = false;
      r.checks.push_back(std::string("FAIL ") + e.what());
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::string checks;
  for (const auto& c : r.checks) checks += (checks.empty() ? "" : "; ") + c;
  return fmt::format("criterion {:2d}: {}  {}  [{}]", r.id, r.passed ? "PASS" : "FAIL", r.title,
                     checks);
}

}  // namespace qpscope::acceptance
