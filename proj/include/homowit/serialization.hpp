// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file serialization.hpp
 * @brief JSON and CSV formats for states, records, distributions, SDPs,
 * bound curves and verdicts.
 *
 * Floating-point values are written with 17 significant digits so that a
 * write/read cycle reproduces every double exactly.
 */

#pragma once

#include "homowit/bounds.hpp"
#include "homowit/fock.hpp"
#include "homowit/homodyne.hpp"
#include "homowit/sdp.hpp"
#include "homowit/tomo.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace homowit::io {

using Json = nlohmann::ordered_json;

/// Input that does not follow one of the formats below.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);
  const std::string& source() const { return source_; }
  /// 1-based; 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// "%.17g"; non-finite values are written as nan/inf.
std::string format_double(double v);

// Density matrices: {"dim_a", "dim_b", "re": [[...]], "im": [[...]]}.
Json state_to_json(const BipartiteFockState& rho);
BipartiteFockState state_from_json(const Json& j);

// QuadratureRecord CSV.
inline constexpr const char* kRecordsHeader = "event_id,setting_a,setting_b,x_a,x_b";
void write_records_csv(std::ostream& os, std::span<const QuadratureRecord> records);
std::string records_to_csv(std::span<const QuadratureRecord> records);
/// Columns may appear in any order; all five are required. Rejects setting
/// labels outside {1, 2} and non-finite quadratures.
std::vector<QuadratureRecord> parse_records_csv(std::istream& is, const std::string& source = "<stream>");
std::vector<QuadratureRecord> read_records_csv(const std::filesystem::path& path);

// Photon-number distributions.
Json distribution_to_json(const PhotonNumberDistribution& d);
/// {"party_a": ..., "party_b": ..., "p_star": ..., "delta_p_star": ..., "p_star_raw": ..., "p_star_clipped": ...}
Json distribution_report(const PhotonNumberDistribution& a, const PhotonNumberDistribution& b, const PStar& p_star);

// SDP problems and solutions.
Json problem_to_json(const sdp::SdpProblem& problem);
sdp::SdpProblem problem_from_json(const Json& j);
Json solution_to_json(const sdp::SdpSolution& solution, bool with_history = false);

// Bounds and verdicts.
Json bound_result_to_json(const SeparableBoundResult& result);
Json verdict_to_json(const WitnessVerdict& v);

struct BoundCurvePoint {
  double p_star = 0.0;
  double qubit_ppt = 0.0;
  double full_ppt = 0.0;
};

inline constexpr const char* kBoundCurveHeader = "p_star,s_sep_max_qubit_ppt,s_sep_max_full_ppt";
void write_bound_curve_csv(std::ostream& os, std::span<const BoundCurvePoint> curve);
std::vector<BoundCurvePoint> parse_bound_curve_csv(std::istream& is, const std::string& source = "<stream>");

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace homowit::io
