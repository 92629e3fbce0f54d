// Copyright 2025 The rydtoff Authors
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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydtoff/dynamics.hpp"
#include "rydtoff/error.hpp"
#include "rydtoff/errormodels.hpp"
#include "rydtoff/geometry.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/optimizer.hpp"
#include "rydtoff/physparams.hpp"
#include "run_config.hpp"

namespace rydtoff::cli {
namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::uint64_t seed = 0;
  int workers = 0;
  std::string species;
  std::string output;
};

struct GeometryArgs {
  std::string geometry;
  int n = 0;
  double radius = 5.0;
  int m = 60;
  int runs = 100;  // restarts when the geometry has to be optimized
};

void add_common(RunConfig& rc, Common& c) {
  rc.option("seed", c.seed, "64-bit seed");
  rc.option("workers", c.workers, "worker threads (0: hardware concurrency)")->envname("RYDTOFF_WORKERS");
  rc.option("species", c.species, "species table file (default: built-in)");
  rc.option("output", c.output, "output file (default: stdout)");
}

void add_geometry(RunConfig& rc, GeometryArgs& g) {
  rc.option("geometry", g.geometry, "geometry JSON file");
  rc.option("n", g.n, "number of controls when no geometry file is given");
  rc.option("radius", g.radius, "control-target distance, um");
  rc.option("m", g.m, "principal quantum number");
  rc.option("runs", g.runs, "optimizer restarts for geometries without a closed form");
}

SpeciesParams species(const Common& c, int m) {
  if (c.species.empty()) return lookup_species(m);
  return SpeciesTable::from_file(c.species).lookup(m);
}

// Known optima for n = 1, 2, 4, 6; anything else is optimized.
Geometry resolve_geometry(const GeometryArgs& a, const Common& c, const SpeciesParams& sp) {
  if (!a.geometry.empty()) return load_geometry(a.geometry);
  const double r = a.radius;
  switch (a.n) {
    case 0:
      throw Error(ErrorCode::kInvalidArgument, "either --geometry or --n is required");
    case 1:
      return geometry_from_angles(r, {{0.0, 0.0}});
    case 2:
      return geometry_from_angles(r, {{0.0, 0.0}, {kPi, 0.0}});
    case 4:
      return regular_tetrahedron(r, std::acos(std::sqrt(2.0 / 3.0)), 0.0);
    case 6:
      return geometry_from_angles(r, {{kPi / 2, kPi}, {kPi / 2, 3 * kPi / 2}, {kPi / 2, 0.0}, {kPi / 2, kPi / 2},
                                      {0.0, 0.0}, {kPi, 0.0}});
    default: {
      OptimizerConfig oc;
      oc.ensemble_runs = a.runs;
      oc.seed = c.seed;
      oc.workers = c.workers;
      return optimize_ensemble(a.n, r, sp, oc).best.geometry;
    }
  }
}

json geometry_json(const Geometry& g) { return json::parse(geometry_to_json(g, -1)); }

json angles_json(const std::vector<SphericalPoint>& a) {
  json out = json::array();
  for (const auto& p : a) out.push_back({{"theta", p.theta}, {"phi", p.phi}});
  return out;
}

json drive_json(const DriveParams& d) {
  return {{"omega_t_mhz", units::to_mhz(d.omega_t)},
          {"omega_c_mhz", units::to_mhz(d.omega_c)},
          {"duration_us", d.t_det}};
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(const Common& c, const RunConfig& rc, json result) {
  Sink s(c.output);
  s.out() << json{{"config", rc.to_json()}, {"result", std::move(result)}}.dump(2) << '\n';
}

// CSV with the run config on a leading comment line.
void emit_csv(const Common& c, const RunConfig& rc, const std::string& header,
              const std::vector<std::string>& rows) {
  Sink s(c.output);
  s.out() << "# " << rc.to_json().dump() << '\n' << header << '\n';
  for (const auto& r : rows) s.out() << r << '\n';
}

std::string csv_row(std::initializer_list<double> v) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (double x : v) {
    os << (first ? "" : ",") << x;
    first = false;
  }
  return os.str();
}

// optimize -----------------------------------------------------------------

struct OptimizeCmd {
  Common c;
  int n = 0;
  double radius = 5.0;
  int m = 60;
  OptimizerConfig oc;
  std::string trace;
  std::string geometry_out;

  void add(RunConfig& rc) {
    rc.option("n", n, "number of controls")->required();
    rc.option("radius", radius, "control-target distance, um");
    rc.option("m", m, "principal quantum number");
    rc.option("runs", oc.ensemble_runs, "independent restarts");
    rc.option("perturb", oc.perturb_fraction, "relative perturbation half-width");
    rc.option("tol", oc.convergence_tol, "chi gain below which a run stops");
    rc.option("min-iterations", oc.min_iterations, "iteration floor per run");
    rc.option("max-iterations", oc.max_iterations, "iteration cap per run");
    rc.option("patience", oc.patience, "rejections after which a run stops");
    rc.option("scale-decades", oc.scale_decades, "decades spanned by the step-scale mixture");
    rc.option("trace", trace, "write the best run's chi trace as CSV");
    rc.option("geometry-out", geometry_out, "write the best geometry JSON");
    add_common(rc, c);
  }

  void run(const RunConfig& rc) {
    oc.seed = c.seed;
    oc.workers = c.workers;
    const SpeciesParams sp = species(c, m);
    EnsembleResult e = optimize_ensemble(n, radius, sp, oc);
    PairInteractions pi = pair_interactions(e.best.geometry, sp);
    json r = {{"chi", e.best.chi},
              {"iterations", e.best.iterations},
              {"run_index", e.best.run_index},
              {"converged_runs", e.converged_runs},
              {"min_u_ct_mhz", units::to_mhz(pi.min_abs_u_ct())},
              {"max_u_cc_mhz", units::to_mhz(pi.max_abs_u_cc())},
              {"angles", angles_json(control_angles(e.best.geometry))},
              {"angle_mean", angles_json(e.angle_mean)},
              {"angle_std", angles_json(e.angle_std)},
              {"geometry", geometry_json(e.best.geometry)}};
    if (!geometry_out.empty()) save_geometry(e.best.geometry, geometry_out);
    if (!trace.empty()) {
      OptimizerConfig tc = oc;
      tc.record_trace = true;
      Rng rng = make_rng(oc.seed, {static_cast<std::uint64_t>(e.best.run_index)});
      OptimizerResult best = optimize_run(n, radius, sp, tc, rng);
      std::vector<std::string> rows;
      for (const auto& t : best.trace) rows.push_back(std::to_string(t.iteration) + "," + csv_row({t.chi}));
      Common tcommon = c;
      tcommon.output = trace;
      emit_csv(tcommon, rc, "iteration,chi", rows);
    }
    emit_json(c, rc, r);
  }
};

// nmax-grid ------------------------------------------------------------------

struct NmaxGridCmd {
  Common c;
  std::vector<double> radii{5.0};
  std::vector<int> ms{60};
  double threshold = 100.0;
  int n_limit = 20;
  OptimizerConfig oc;

  void add(RunConfig& rc) {
    oc.ensemble_runs = 100;
    rc.list("radii", radii, "control-target distances, um");
    rc.list("ms", ms, "principal quantum numbers");
    rc.option("threshold", threshold, "minimum chi for a valid n");
    rc.option("n-limit", n_limit, "largest n tried");
    rc.option("runs", oc.ensemble_runs, "restarts per (R, m, n)");
    rc.option("min-iterations", oc.min_iterations, "iteration floor per run");
    add_common(rc, c);
  }

  void run(const RunConfig& rc) {
    if (radii.empty() || ms.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid");
    oc.seed = c.seed;
    oc.workers = c.workers;
    std::vector<std::string> rows;
    for (double r : radii) {
      for (int m : ms) {
        const SpeciesParams sp = species(c, m);
        NmaxResult res = find_n_max(r, sp, oc, threshold, n_limit);
        double chi = std::nan(""), chi_next = std::nan(""), umin = std::nan(""), fid = std::nan("");
        for (std::size_t i = 0; i < res.n.size(); ++i) {
          if (res.n[i] == res.n_max) {
            chi = res.chi[i];
            double u = pair_interactions(res.best[i].geometry, sp).min_abs_u_ct();
            umin = units::to_mhz(u);
            fid = 1.0 - decay_error_analytic(res.n_max, derive_drive(u), sp);
          } else if (res.n[i] == res.n_max + 1) {
            chi_next = res.chi[i];
          }
        }
        rows.push_back(csv_row({r, static_cast<double>(m), static_cast<double>(res.n_max), chi, chi_next, umin, fid}));
      }
    }
    emit_csv(c, rc, "radius_um,m,n_max,chi,chi_next,min_u_ct_mhz,fidelity", rows);
  }
};

// simulate -------------------------------------------------------------------

DecayConvention decay_convention(const std::string& s) {
  return s == "branch-sum" ? DecayConvention::kBranchSum : DecayConvention::kTotalRate;
}

struct TrajectoryArgs {
  int traj = 500;
  double dt = 0.0;
  std::string estimator = "stratified";
  std::string decay = "total";

  void add(RunConfig& rc, int default_traj) {
    traj = default_traj;
    rc.option("traj", traj, "trajectories per input");
    rc.option("dt", dt, "jump-time resolution, us (0: default)");
    rc.option("estimator", estimator, "trajectory estimator")->check(CLI::IsMember({"stratified", "plain"}));
    rc.option("decay", decay, "decay-rate convention")->check(CLI::IsMember({"total", "branch-sum"}));
  }

  TrajectoryConfig config(const Common& c) const {
    TrajectoryConfig t;
    t.n_traj = traj;
    t.dt = dt;
    t.seed = c.seed;
    t.workers = c.workers;
    t.estimator = estimator == "plain" ? Estimator::kPlain : Estimator::kStratified;
    return t;
  }
};

json fidelity_json(const FidelityResult& f, std::uint64_t seed) {
  json inputs = json::array();
  for (const auto& in : f.inputs) {
    inputs.push_back({{"input", in.input},
                      {"fidelity", in.fidelity},
                      {"std_error", in.std_error},
                      {"no_jump_weight", in.no_jump_weight},
                      {"mean_jumps", in.mean_jumps}});
  }
  return {{"fidelity", f.mean}, {"std_error", f.std_error}, {"seed", seed}, {"inputs", inputs}};
}

struct SimulateCmd {
  Common c;
  GeometryArgs g;
  TrajectoryArgs t;

  void add(RunConfig& rc) {
    add_geometry(rc, g);
    t.add(rc, 500);
    add_common(rc, c);
  }

  void run(const RunConfig& rc) {
    const SpeciesParams sp = species(c, g.m);
    Geometry geo = resolve_geometry(g, c, sp);
    DriveParams drive = derive_drive(pair_interactions(geo, sp).min_abs_u_ct());
    GateSimulator sim(GateModel::from_geometry(geo, sp, decay_convention(t.decay)), PulseSchedule::standard(drive));
    FidelityResult f = sim.average_fidelity(t.config(c));
    json r = fidelity_json(f, c.seed);
    r["n"] = geo.n();
    r["drive"] = drive_json(drive);
    r["analytic_fidelity"] = 1.0 - decay_error_analytic(geo.n(), drive, sp);
    r["geometry"] = geometry_json(geo);
    emit_json(c, rc, r);
  }
};

// noise-scan -----------------------------------------------------------------

struct NoiseScanCmd {
  Common c;
  GeometryArgs g;
  TrajectoryArgs t;
  std::string family;
  std::vector<double> values;
  double temp = -1.0;
  int samples = 500;
  std::string sharing = "laser";
  std::string axis = "x";
  double fixed_sigma = 0.27;

  void add(RunConfig& rc) {
    g.n = 6;
    rc.option("family", family, "noise family")
        ->required()
        ->check(CLI::IsMember({"position", "amplitude", "phase", "doppler"}));
    rc.list("values", values, "scan values: sigma (um), delta_Omega, sigma_phi (rad) or T (uK)");
    rc.option("temp", temp, "single Doppler temperature, uK");
    rc.option("samples", samples, "noise samples per point");
    rc.option("sharing", sharing, "amplitude/phase draws per laser or per stage")
        ->check(CLI::IsMember({"laser", "stage"}));
    rc.option("axis", axis, "position scan axis")->check(CLI::IsMember({"x", "y", "z"}));
    rc.option("fixed-sigma", fixed_sigma, "position spread on the other axes, um");
    add_geometry(rc, g);
    t.add(rc, 20);
    add_common(rc, c);
  }

  void run(const RunConfig& rc) {
    std::vector<double> xs = values;
    if (temp >= 0.0) xs.push_back(temp);
    if (xs.empty()) throw Error(ErrorCode::kInvalidArgument, "no scan values given");
    const SpeciesParams sp = species(c, g.m);
    Geometry geo = resolve_geometry(g, c, sp);
    DriveParams drive = derive_drive(pair_interactions(geo, sp).min_abs_u_ct());
    const DecayConvention conv = decay_convention(t.decay);
    std::vector<ScanPoint> pts;
    if (family == "position") {
      PositionScanConfig pc;
      pc.axis = axis == "y" ? Axis::kY : axis == "z" ? Axis::kZ : Axis::kX;
      pc.sigmas = xs;
      pc.fixed_sigma = fixed_sigma;
      pc.samples = samples;
      pc.seed = c.seed;
      pc.workers = c.workers;
      pc.trajectory = t.config(c);
      pts = position_error_scan(geo, sp, drive, pc, conv);
    } else {
      GateModel model = GateModel::from_geometry(geo, sp, conv);
      PulseSchedule sched = PulseSchedule::standard(drive);
      NoiseScanConfig nc;
      nc.samples = samples;
      nc.seed = c.seed;
      nc.workers = c.workers;
      nc.trajectory = t.config(c);
      const NoiseSharing sh = sharing == "stage" ? NoiseSharing::kPerStage : NoiseSharing::kPerLaser;
      if (family == "amplitude") {
        pts = amplitude_noise_scan(model, sched, xs, nc, sh);
      } else if (family == "phase") {
        pts = phase_noise_scan(model, sched, xs, nc, sh);
      } else {
        pts = doppler_scan(model, sched, xs, nc);
      }
    }
    std::vector<std::string> rows;
    for (const auto& p : pts) rows.push_back(csv_row({p.x, p.mean, p.std_error}));
    emit_csv(c, rc, family == "position" ? "sigma_um,infidelity_increase,std_error" : "x,infidelity,std_error", rows);
  }
};

// leakage --------------------------------------------------------------------

struct LeakageCmd {
  Common c;
  GeometryArgs g;
  TrajectoryArgs t;
  std::string mode;
  int kappa = 1;
  double dist = 5.0;
  double drive_radius = 5.0;
  std::vector<int> ct_kappas{1, 2};
  int cc_kappa = 1;

  void add(RunConfig& rc) {
    g.n = 2;
    rc.option("mode", mode, "ct: control-target, cc: control-control, gate: full gate")
        ->required()
        ->check(CLI::IsMember({"ct", "cc", "gate"}));
    rc.option("kappa", kappa, "leakage channel (1-4)");
    rc.option("dist", dist, "pair distance, um (R_ct for ct, d_cc for cc)");
    rc.option("drive-radius", drive_radius, "R_ct fixing the reference drive, um");
    rc.list("ct-kappas", ct_kappas, "control-target channels in gate mode");
    rc.option("cc-kappa", cc_kappa, "control-control channel in gate mode (0: none)");
    add_geometry(rc, g);
    t.add(rc, 500);
    add_common(rc, c);
  }

  void run(const RunConfig& rc) {
    json r;
    if (mode == "ct" || mode == "cc") {
      DriveParams d = leakage_drive(drive_radius);
      const LeakageChannel& ch = mode == "ct" ? ct_leakage_channel(kappa) : cc_leakage_channel(kappa);
      double e = mode == "ct" ? leakage_ct_rotation_error(kappa, dist, d) : leakage_cc_error(kappa, dist, d);
      r = {{"error", e}, {"kappa", kappa}, {"pair", ch.pair_label}, {"distance_um", dist}, {"drive", drive_json(d)}};
    } else {
      const SpeciesParams sp = species(c, g.m);
      Geometry geo = resolve_geometry(g, c, sp);
      DriveParams drive = derive_drive(pair_interactions(geo, sp).min_abs_u_ct());
      FidelityResult f = gate_fidelity_with_leakage(geo, sp, drive, t.config(c), LeakageSelection{ct_kappas, cc_kappa},
                                                    decay_convention(t.decay));
      r = fidelity_json(f, c.seed);
      r["n"] = geo.n();
      r["drive"] = drive_json(drive);
    }
    emit_json(c, rc, r);
  }
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStepTooLarge:
    case ErrorCode::kNonPositiveInteraction:
    case ErrorCode::kCoincidentAtoms:
    case ErrorCode::kZeroDistance:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

void report(const std::string& code, const std::string& msg) {
  std::cerr << json{{"error", code}, {"message", msg}}.dump() << '\n';
}

int run(std::vector<std::string> args) {
  CLI::App app{"Multiqubit Rydberg Toffoli gate design and simulation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  OptimizeCmd optimize;
  NmaxGridCmd nmax;
  SimulateCmd simulate;
  NoiseScanCmd noise;
  LeakageCmd leakage;
  std::string replay_file;
  std::string replay_output;

  RunConfig rc_opt(app.add_subcommand("optimize", "optimize control positions"), "optimize");
  RunConfig rc_nmax(app.add_subcommand("nmax-grid", "n_max over a (R, m) grid"), "nmax-grid");
  RunConfig rc_sim(app.add_subcommand("simulate", "average gate fidelity"), "simulate");
  RunConfig rc_noise(app.add_subcommand("noise-scan", "infidelity under position or technical noise"), "noise-scan");
  RunConfig rc_leak(app.add_subcommand("leakage", "leakage errors"), "leakage");
  CLI::App* replay = app.add_subcommand("replay", "rerun the config embedded in a result file");
  replay->add_option("file", replay_file, "JSON result or CSV with a config line")->required();
  replay->add_option("--output", replay_output, "output file");
  optimize.add(rc_opt);
  nmax.add(rc_nmax);
  simulate.add(rc_sim);
  noise.add(rc_noise);
  leakage.add(rc_leak);


  std::vector<std::string> expanded = expand_config_files(args);
  std::vector<std::string> rev(expanded.rbegin(), expanded.rend() - 1);
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*replay) {
    std::ifstream in(replay_file);
    if (!in) throw Error(ErrorCode::kParse, "cannot open " + replay_file);
    std::string first;
    std::getline(in, first);
    json cfg;
    if (first.rfind("# ", 0) == 0) {
      cfg = json::parse(first.substr(2));
    } else {
      std::stringstream buf;
      buf << first << '\n' << in.rdbuf();
      cfg = json::parse(buf.str()).at("config");
    }
    // Replays go to stdout unless redirected, never over the original file.
    cfg["options"]["output"] = replay_output;
    std::vector<std::string> again{expanded.front()};
    for (auto& a : replay_arguments(cfg)) again.push_back(std::move(a));
    return run(std::move(again));
  }

  if (*rc_opt.app()) optimize.run(rc_opt);
  if (*rc_nmax.app()) nmax.run(rc_nmax);
  if (*rc_sim.app()) simulate.run(rc_sim);
  if (*rc_noise.app()) noise.run(rc_noise);
  if (*rc_leak.app()) leakage.run(rc_leak);
  return 0;
}

}  // namespace
}  // namespace rydtoff::cli

int main(int argc, char** argv) {
  using namespace rydtoff;
  try {
    return cli::run(std::vector<std::string>(argv, argv + argc));
  } catch (const Error& e) {
    cli::report(std::string(error_code_name(e.code())), e.what());
    return cli::exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    cli::report("parse", e.what());
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    cli::report("numerical", e.what());
    return cli::kExitNumerical;
  }
}
