// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: simulate, tomo, bound, witness, sweep, ingest-check.
// Exit status: 0 success, 1 configuration or input error, 2 failed points.

#include "homowit/bounds.hpp"
#include "homowit/pipeline.hpp"
#include "homowit/serialization.hpp"
#include "homowit/tomo.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace {

using namespace homowit;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFailure = 2;

// Flags that map onto RunConfig keys; only flags given on the command line
// override the config file.
struct RunFlags {
  std::map<std::string, std::string> values;
  std::string config_file;

  void add(CLI::App* app, bool with_mode) {
    auto opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
      app->add_option(flag, values[key], help);
    };
    opt("--theta", "theta", "Angle(s) in degrees: list '0,22.5' or range 'start:stop:step'");
    opt("--events", "events", "Events per setting pair");
    opt("--eta-a", "eta_a", "Transmission of mode A");
    opt("--eta-b", "eta_b", "Transmission of mode B");
    opt("--seed", "seed", "Random seed");
    opt("--angle-error-deg", "angle_error_deg", "Half-width of the angle-error interval in degrees");
    opt("--out", "out", "Output directory");
    opt("--rounds", "bootstrap_rounds", "Bootstrap rounds");
    opt("--tomo-levels", "tomo_levels", "Highest reconstructed photon number");
    opt("--curve-points", "curve_points", "Points of the emitted bound curve");
    opt("--dim", "dim", "Per-mode Fock dimension of the simulated state");
    if (with_mode) {
      opt("--mode", "mode", "simulate or ingest");
      opt("--in", "input", "Records CSV for ingest mode");
    }
    app->add_flag_callback("--check-angle-corners", [this] { values["check_angle_corners"] = "true"; },
                           "Solve all four angle corners and report whether (+e,-e) is extremal");
    app->add_option("--config", config_file, "Flat key = value configuration file");
  }

  RunConfig build(RunConfig base = {}) const {
    if (!config_file.empty()) base = load_config(config_file, base);
    for (const auto& [key, value] : values)
      if (!value.empty()) base.set(key, value);
    return base;
  }
};

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    io::write_file_atomic(path, contents);
  }
}

int run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const auto reports = run_witness(cfg);
  const auto curve = emit_bound_curve(cfg.curve_points, cfg.solver());
  write_run_outputs(cfg, reports, curve);
  int failed = 0;
  for (const auto& r : reports) {
    if (r.ok()) {
      std::printf("theta=%-6g S_obs=%.4f +- %.4f  p*=%.4f  bound(qubit)=%.4f  bound(full)=%.4f  %s\n", r.theta_deg,
                  r.chsh.s_obs, r.chsh.s_stderr, r.p_star.value, r.bound_qubit.s_sep_max, r.bound_full.s_sep_max,
                  to_string(r.verdict.conclusion));
    } else {
      ++failed;
      std::printf("theta=%-6g FAILED at %s: %s\n", r.theta_deg, r.error->stage.c_str(), r.error->message.c_str());
    }
  }
  std::printf("outputs written to %s\n", cfg.out_dir.c_str());
  return failed ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon entanglement witness from local homodyne data"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate quadrature records for one theta");
  RunFlags sim_flags;
  std::string sim_records = "records.csv";
  bool sim_all_pairs = false;
  sim->add_option("--theta", sim_flags.values["theta"], "Angle in degrees");
  sim->add_option("--events", sim_flags.values["events"], "Events per setting pair");
  sim->add_option("--eta-a", sim_flags.values["eta_a"], "Transmission of mode A");
  sim->add_option("--eta-b", sim_flags.values["eta_b"], "Transmission of mode B");
  sim->add_option("--seed", sim_flags.values["seed"], "Random seed");
  sim->add_option("--dim", sim_flags.values["dim"], "Per-mode Fock dimension");
  sim->add_option("--config", sim_flags.config_file, "Configuration file");
  sim->add_option("--out", sim_records, "Output CSV ('-' for stdout)");
  sim->add_flag("--all-pairs", sim_all_pairs, "Also record setting pairs (2,1) and (2,2)");

  // tomo
  auto* tomo = app.add_subcommand("tomo", "Photon-number distributions and p* from records");
  std::string tomo_in, tomo_out = "-";
  int tomo_levels = kDefaultTomoLevels, tomo_guard = 0, tomo_rounds = 200;
  std::uint64_t tomo_seed = 1;
  tomo->add_option("--in", tomo_in, "Records CSV")->required();
  tomo->add_option("--out", tomo_out, "Distribution report JSON ('-' for stdout)");
  tomo->add_option("--levels", tomo_levels, "Highest reconstructed photon number");
  tomo->add_option("--guard", tomo_guard, "Extra levels the kernel is made blind to");
  tomo->add_option("--rounds", tomo_rounds, "Bootstrap rounds");
  tomo->add_option("--seed", tomo_seed, "Bootstrap seed");

  // bound
  auto* bound = app.add_subcommand("bound", "Separable bound at one p* or over a grid");
  double bound_p = 0.0, bound_dp = 0.0, bound_angle_deg = 1.0;
  std::string bound_mode = "qubit-subspace-ppt", bound_out = "-", bound_marginals, bound_problem_out;
  int bound_points = 0;
  bool bound_full_scope = false;
  bound->add_option("--p-star", bound_p, "p* in [0, 1]");
  bound->add_option("--delta-p-star", bound_dp, "Error on p* (experiment mode)");
  bound->add_option("--mode", bound_mode, "qubit-subspace-ppt | full-ppt | experiment");
  bound->add_option("--angle-error-deg", bound_angle_deg, "Angle-error half-width in degrees (experiment mode)");
  bound->add_option("--marginals", bound_marginals, "Distribution report JSON from 'tomo' (experiment mode)");
  bound->add_flag("--full", bound_full_scope, "Experiment mode with PPT on the full 9x9 matrix");
  bound->add_option("--curve", bound_points, "Emit the bound curve CSV on this many grid points instead");
  bound->add_option("--problem-out", bound_problem_out, "Also dump the SDP problem as JSON");
  bound->add_option("--out", bound_out, "Output file ('-' for stdout)");

  // witness / sweep
  auto* wit = app.add_subcommand("witness", "Five-step witness procedure for one theta or an ingested file");
  RunFlags wit_flags;
  wit_flags.add(wit, true);
  auto* sweep = app.add_subcommand("sweep", "Witness procedure over a theta sweep (default 0:45:5)");
  RunFlags sweep_flags;
  sweep_flags.add(sweep, false);

  // ingest-check
  auto* chk = app.add_subcommand("ingest-check", "Validate a records CSV and report per-setting counts");
  std::string chk_in, chk_out = "-";
  chk->add_option("--in", chk_in, "Records CSV")->required();
  chk->add_option("--out", chk_out, "Report JSON ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      RunConfig cfg = sim_flags.build();
      cfg.validate();
      if (cfg.thetas.size() != 1) throw ConfigError("simulate takes a single theta");
      auto records = simulate_records(cfg.thetas.front(), cfg);
      if (sim_all_pairs) {
        const auto rho = simulated_state(cfg.thetas.front(), cfg);
        const MeasurementConfig mc;
        const auto n = static_cast<std::int64_t>(cfg.events);
        for (int slot = 2; slot < 4; ++slot) {
          const SettingPair pair{2, slot - 1};
          const auto extra = sample_events(rho, mc, pair, cfg.events, cfg.seed, slot * n);
          records.insert(records.end(), extra.begin(), extra.end());
        }
      }
      write_output(sim_records, io::records_to_csv(records));
      std::fprintf(stderr, "wrote %zu records\n", records.size());
      return kExitOk;
    }
    if (tomo->parsed()) {
      const auto records = io::read_records_csv(tomo_in);
      std::vector<double> xa, xb;
      for (const auto& r : records) {
        xa.push_back(r.x_a);
        xb.push_back(r.x_b);
      }
      const auto kernel = ReconstructionKernel::build(tomo_levels, tomo_guard);
      const auto a = estimate_with_errors(xa, kernel, Party::A, tomo_rounds, tomo_seed);
      const auto b = estimate_with_errors(xb, kernel, Party::B, tomo_rounds, tomo_seed + 1);
      write_output(tomo_out, io::distribution_report(a, b, p_star(a, b)).dump(2) + "\n");
      return kExitOk;
    }
    if (bound->parsed()) {
      if (bound_points > 0) {
        const auto curve = emit_bound_curve(bound_points);
        std::ostringstream os;
        io::write_bound_curve_csv(os, curve);
        write_output(bound_out, os.str());
        return kExitOk;
      }
      BoundRequest req;
      req.p_star = bound_p;
      req.delta_p_star = bound_dp;
      req.mode = parse_bound_mode(bound_mode);
      req.angle_error_bound = bound_angle_deg * std::numbers::pi / 180.0;
      req.experiment_ppt = bound_full_scope ? PptScope::Full : PptScope::QubitSubspace;
      if (!bound_marginals.empty()) {
        const auto j = io::Json::parse(io::read_file(bound_marginals));
        LocalMarginals m;
        auto fill = [](const io::Json& d, std::array<double, 3>& p, std::array<double, 3>& dp) {
          const auto pc = d.at("p_clipped").get<std::vector<double>>();
          const auto dl = d.at("delta_p").get<std::vector<double>>();
          if (pc.size() < 2 || dl.size() < 2) throw ConfigError("marginals need at least two levels");
          p = {pc[0], pc[1], std::clamp(d.at("p_tail").get<double>(), 0.0, 1.0)};
          dp = {dl[0], dl[1], d.at("delta_p_tail").get<double>()};
        };
        fill(j.at("party_a"), m.p_a, m.delta_a);
        fill(j.at("party_b"), m.p_b, m.delta_b);
        req.marginals = m;
        if (!bound->count("--p-star")) req.p_star = j.at("p_star").get<double>();
        if (!bound->count("--delta-p-star")) req.delta_p_star = j.at("delta_p_star").get<double>();
      }
      if (!bound_problem_out.empty()) {
        io::write_file_atomic(bound_problem_out, io::problem_to_json(build_bound_problem(req)).dump(2) + "\n");
      }
      const auto res = separable_bound(req);
      auto j = io::bound_result_to_json(res);
      j["mode"] = to_string(req.mode);
      write_output(bound_out, j.dump(2) + "\n");
      return res.ok() ? kExitOk : kExitFailure;
    }
    if (wit->parsed()) {
      RunConfig cfg = wit_flags.build();
      if (cfg.source == DataSource::Simulate && cfg.thetas.size() != 1) {
        throw ConfigError("witness takes a single theta; use sweep for several");
      }
      return run_pipeline(cfg);
    }
    if (sweep->parsed()) {
      RunConfig base;
      base.thetas = {0, 5, 10, 15, 20, 22.5, 25, 30, 35, 40, 45};
      return run_pipeline(sweep_flags.build(base));
    }
    if (chk->parsed()) {
      const auto rep = ingest(chk_in);
      write_output(chk_out, ingest_report_to_json(rep).dump(2) + "\n");
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "homowit: configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const io::ParseError& e) {
    std::fprintf(stderr, "homowit: input error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "homowit: invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "homowit: error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
