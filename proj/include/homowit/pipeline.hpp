// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pipeline.hpp
 * @brief End-to-end witness runs: simulate or ingest records, reconstruct
 * local photon statistics, bound, estimate S_obs and compare.
 */

#pragma once

#include "homowit/bounds.hpp"
#include "homowit/homodyne.hpp"
#include "homowit/serialization.hpp"
#include "homowit/tomo.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace homowit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataSource { Simulate, Ingest };

struct RunConfig {
  std::vector<double> thetas{22.5};
  std::size_t events = 200000;  // per setting pair
  double eta_a = 1.0;
  double eta_b = 1.0;
  double angle_error_deg = 1.0;  // half-width of the angle-error interval
  std::uint64_t seed = 1;
  DataSource source = DataSource::Simulate;
  std::string input;  // records CSV in ingest mode
  std::string out_dir = "homowit-out";
  int dim = kDefaultModeDim;
  int tomo_levels = kDefaultTomoLevels;
  int tomo_guard = 0;
  int bootstrap_rounds = 200;
  int curve_points = 50;
  bool check_angle_corners = false;
  double solver_tol = 1e-8;
  int solver_max_iter = 200;

  /// Sets one key from its text form; throws ConfigError for unknown keys
  /// or malformed values.
  void set(std::string_view key, std::string_view value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Throws ConfigError when the configuration cannot run.
  void validate() const;
  sdp::SolverOptions solver() const { return {solver_tol, solver_max_iter}; }
};

/// Flat "key = value" file; '#' starts a comment. Keys match RunConfig::set.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// The simulated source: tunable state through the loss channel.
BipartiteFockState simulated_state(double theta_deg, const RunConfig& config);

/// Records for the two correlators (1,1) and (1,2), config.events each.
std::vector<QuadratureRecord> simulate_records(double theta_deg, const RunConfig& config);

struct StageError {
  std::string stage;
  std::string message;
};

struct ThetaReport {
  double theta_deg = 0.0;
  std::optional<StageError> error;
  std::size_t n_records = 0;
  PhotonNumberDistribution dist_a;
  PhotonNumberDistribution dist_b;
  PStar p_star;
  SeparableBoundResult bound_qubit;
  SeparableBoundResult bound_full;
  ChshEstimate chsh;
  WitnessVerdict verdict;
  /// Exact phase-averaged S of the simulated state; NaN for ingested data.
  double s_theory = 0.0;
  std::optional<CornerCheck> corners;

  bool ok() const { return !error.has_value(); }
};

/// The five steps on one record set: local distributions, p*, bounds,
/// S_obs from two correlators, comparison. Stage failures are captured in
/// the report.
ThetaReport witness_from_records(std::span<const QuadratureRecord> records, const RunConfig& config,
                                 double theta_deg);

/// One report per configured theta (simulate) or a single report (ingest).
std::vector<ThetaReport> run_witness(const RunConfig& config);

/// Bound curve on a uniform p* grid over [0, 1] for both PPT modes. Throws
/// std::runtime_error if a solve fails or monotonicity / ordering is
/// violated.
std::vector<io::BoundCurvePoint> emit_bound_curve(int points = 50, const sdp::SolverOptions& solver = {});

struct IngestReport {
  std::filesystem::path path;
  std::vector<QuadratureRecord> records;
  std::array<std::size_t, 4> counts{};  // by MeasurementConfig::slot
  std::uintmax_t bytes = 0;
};

IngestReport ingest(const std::filesystem::path& path);

io::Json report_to_json(const ThetaReport& report);
io::Json ingest_report_to_json(const IngestReport& report);
io::Json provenance_json(const RunConfig& config);

/// theta_deg, s_obs, ... one row per report.
std::string theta_table_csv(std::span<const ThetaReport> reports);
std::string gnuplot_script();

/// Writes per-theta verdict JSON, theta table, bound curve, gnuplot script
/// and provenance into config.out_dir. Every file is written atomically.
void write_run_outputs(const RunConfig& config, std::span<const ThetaReport> reports,
                       std::span<const io::BoundCurvePoint> curve);

}  // namespace homowit
