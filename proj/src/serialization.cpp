// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace homowit::io {
namespace {

std::string where(const std::string& source, std::size_t line) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  return os.str();
}

Json real_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json complex_matrix(const CMatrix& m) { return Json{{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}}; }

Eigen::MatrixXd read_rows(const Json& j, Eigen::Index n, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw ParseError("<json>", 0, std::string(what) + " must have " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError("<json>", 0, std::string(what) + " row " + std::to_string(r) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!row[c].is_number()) throw ParseError("<json>", 0, std::string(what) + " entries must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

CMatrix read_complex(const Json& j, Eigen::Index n) {
  CMatrix m(n, n);
  m.real() = read_rows(j.at("re"), n, "re");
  m.imag() = j.contains("im") ? read_rows(j.at("im"), n, "im") : Eigen::MatrixXd::Zero(n, n);
  return m;
}

Json functional_to_json(const sdp::LinearFunctional& f) {
  Json terms = Json::array();
  for (const auto& [var, w] : f.terms) {
    Json t = complex_matrix(w);
    t["var"] = var.index;
    terms.push_back(std::move(t));
  }
  return Json{{"constant", f.constant}, {"terms", std::move(terms)}};
}

sdp::LinearFunctional functional_from_json(const Json& j, const std::vector<sdp::Variable>& vars) {
  sdp::LinearFunctional f;
  f.constant = j.value("constant", 0.0);
  for (const auto& t : j.at("terms")) {
    const int v = t.at("var").get<int>();
    if (v < 0 || v >= static_cast<int>(vars.size())) throw ParseError("<json>", 0, "term references unknown variable");
    f.terms.emplace_back(sdp::VarId{v}, read_complex(t, vars[v].dim));
  }
  return f;
}

const char* sense_text(sdp::Sense s) {
  switch (s) {
    case sdp::Sense::Equal: return "==";
    case sdp::Sense::LessEqual: return "<=";
    case sdp::Sense::GreaterEqual: return ">=";
  }
  return "?";
}

sdp::Sense parse_sense(const std::string& s) {
  if (s == "==") return sdp::Sense::Equal;
  if (s == "<=") return sdp::Sense::LessEqual;
  if (s == ">=") return sdp::Sense::GreaterEqual;
  throw ParseError("<json>", 0, "unknown constraint sense '" + s + "'");
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string f = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : f.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& source, std::size_t line, const char* column) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ParseError(source, line, std::string("column '") + column + "': cannot parse '" + text + "'");
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(where(source, line) + ": " + what), source_(std::move(source)), line_(line) {}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json state_to_json(const BipartiteFockState& rho) {
  Json j{{"dim_a", rho.dim_a()}, {"dim_b", rho.dim_b()}};
  j["re"] = real_rows(rho.matrix().real());
  j["im"] = real_rows(rho.matrix().imag());
  return j;
}

BipartiteFockState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim_a") || !j.contains("dim_b") || !j.contains("re")) {
    throw ParseError("<json>", 0, "density matrix needs dim_a, dim_b and re");
  }
  const int da = j.at("dim_a").get<int>();
  const int db = j.at("dim_b").get<int>();
  if (da < 1 || db < 1 || da > kMaxModeDim || db > kMaxModeDim) {
    throw ParseError("<json>", 0, "mode dimensions must lie in [1, " + std::to_string(kMaxModeDim) + "]");
  }
  return BipartiteFockState(da, db, read_complex(j, static_cast<Eigen::Index>(da) * db));
}

void write_records_csv(std::ostream& os, std::span<const QuadratureRecord> records) {
  os << kRecordsHeader << '\n';
  for (const auto& r : records) {
    os << r.event_id << ',' << r.setting_a << ',' << r.setting_b << ',' << format_double(r.x_a) << ','
       << format_double(r.x_b) << '\n';
  }
}

std::string records_to_csv(std::span<const QuadratureRecord> records) {
  std::ostringstream os;
  write_records_csv(os, records);
  return os.str();
}

std::vector<QuadratureRecord> parse_records_csv(std::istream& is, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError(source, 1, "empty input, expected header");
  ++lineno;
  const auto header = split_fields(strip_cr(line));
  const char* names[5] = {"event_id", "setting_a", "setting_b", "x_a", "x_b"};
  int col[5];
  for (int k = 0; k < 5; ++k) {
    col[k] = -1;
    for (std::size_t h = 0; h < header.size(); ++h)
      if (header[h] == names[k]) col[k] = static_cast<int>(h);
    if (col[k] < 0) throw ParseError(source, 1, std::string("missing column '") + names[k] + "'");
  }

  std::vector<QuadratureRecord> out;
  while (std::getline(is, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size()) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
    }
    QuadratureRecord r;
    r.event_id = parse_number<std::int64_t>(f[col[0]], source, lineno, names[0]);
    r.setting_a = parse_number<int>(f[col[1]], source, lineno, names[1]);
    r.setting_b = parse_number<int>(f[col[2]], source, lineno, names[2]);
    r.x_a = parse_number<double>(f[col[3]], source, lineno, names[3]);
    r.x_b = parse_number<double>(f[col[4]], source, lineno, names[4]);
    if ((r.setting_a != 1 && r.setting_a != 2) || (r.setting_b != 1 && r.setting_b != 2)) {
      throw ParseError(source, lineno,
                       "unknown setting label (" + std::to_string(r.setting_a) + "," + std::to_string(r.setting_b) + ")");
    }
    if (!std::isfinite(r.x_a) || !std::isfinite(r.x_b)) throw ParseError(source, lineno, "non-finite quadrature");
    out.push_back(r);
  }
  return out;
}

std::vector<QuadratureRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return parse_records_csv(in, path.string());
}

Json distribution_to_json(const PhotonNumberDistribution& d) {
  Json j{{"party", d.party == Party::A ? "A" : "B"}};
  j["p"] = d.p;
  j["delta_p"] = d.delta_p;
  j["p_clipped"] = d.clipped();
  j["p_tail"] = d.p_tail;
  j["delta_p_tail"] = d.delta_p_tail;
  j["n_samples"] = d.n_samples;
  j["outside_support"] = d.outside_support;
  j["has_negative"] = d.has_negative;
  return j;
}

Json distribution_report(const PhotonNumberDistribution& a, const PhotonNumberDistribution& b, const PStar& p_star) {
  return Json{{"party_a", distribution_to_json(a)},
              {"party_b", distribution_to_json(b)},
              {"p_star", p_star.value},
              {"delta_p_star", p_star.delta},
              {"p_star_raw", p_star.raw},
              {"p_star_clipped", p_star.clipped}};
}

Json problem_to_json(const sdp::SdpProblem& problem) {
  Json j;
  j["goal"] = problem.goal() == sdp::Goal::Maximize ? "maximize" : "minimize";
  Json vars = Json::array();
  for (const auto& v : problem.variables()) vars.push_back(Json{{"name", v.name}, {"dim", v.dim}});
  j["variables"] = std::move(vars);
  j["objective"] = functional_to_json(problem.objective());
  Json psd = Json::array();
  for (const auto& p : problem.psd_constraints()) {
    Json entries = Json::array();
    for (const auto& e : p.expr.entries()) {
      entries.push_back(Json::array({e.row, e.col, e.var.index, e.var_row, e.var_col, e.coeff.real(), e.coeff.imag()}));
    }
    psd.push_back(Json{{"label", p.label},
                       {"dim", p.expr.dim()},
                       {"constant", complex_matrix(p.expr.constant())},
                       {"entries", std::move(entries)}});
  }
  j["psd"] = std::move(psd);
  Json scalars = Json::array();
  for (const auto& s : problem.scalar_constraints()) {
    scalars.push_back(Json{
        {"label", s.label}, {"lhs", functional_to_json(s.lhs)}, {"sense", sense_text(s.sense)}, {"rhs", s.rhs}});
  }
  j["scalar"] = std::move(scalars);
  return j;
}

sdp::SdpProblem problem_from_json(const Json& j) {
  sdp::SdpProblem prob;
  for (const auto& v : j.at("variables")) prob.add_variable(v.at("dim").get<int>(), v.value("name", std::string()));
  const auto& vars = prob.variables();
  const std::string goal = j.value("goal", std::string("maximize"));
  if (goal != "maximize" && goal != "minimize") throw ParseError("<json>", 0, "goal must be maximize or minimize");
  prob.set_objective(goal == "maximize" ? sdp::Goal::Maximize : sdp::Goal::Minimize,
                     functional_from_json(j.at("objective"), vars));
  for (const auto& p : j.value("psd", Json::array())) {
    const int dim = p.at("dim").get<int>();
    sdp::AffineHermitianExpr e(dim);
    if (p.contains("constant")) e.add_constant(read_complex(p.at("constant"), dim));
    for (const auto& t : p.at("entries")) {
      if (!t.is_array() || t.size() != 7) throw ParseError("<json>", 0, "PSD entries have 7 fields");
      e.add_entry(t[0].get<int>(), t[1].get<int>(), sdp::VarId{t[2].get<int>()}, t[3].get<int>(), t[4].get<int>(),
                  Complex(t[5].get<double>(), t[6].get<double>()));
    }
    prob.add_psd(p.value("label", std::string()), std::move(e));
  }
  for (const auto& s : j.value("scalar", Json::array())) {
    prob.add_scalar(s.value("label", std::string()), functional_from_json(s.at("lhs"), vars),
                    parse_sense(s.at("sense").get<std::string>()), s.at("rhs").get<double>());
  }
  prob.validate();
  return prob;
}

Json solution_to_json(const sdp::SdpSolution& s, bool with_history) {
  Json j{{"status", sdp::to_string(s.status)},
         {"message", s.message},
         {"value", s.value},
         {"dual_bound", s.dual_bound},
         {"gap", s.gap},
         {"primal_infeasibility", s.primal_infeasibility},
         {"dual_infeasibility", s.dual_infeasibility},
         {"iterations", s.iterations}};
  Json vars = Json::array();
  for (const auto& v : s.variables) vars.push_back(complex_matrix(v));
  j["variables"] = std::move(vars);
  j["psd_min_eigenvalues"] = s.psd_min_eigenvalues;
  j["scalar_slacks"] = s.scalar_slacks;
  j["scalar_multipliers"] = s.scalar_multipliers;
  if (with_history) {
    Json h = Json::array();
    for (const auto& r : s.history) {
      h.push_back(Json{{"iteration", r.iteration},
                       {"objective", r.objective},
                       {"dual_bound", r.dual_bound},
                       {"primal_infeasibility", r.primal_infeasibility},
                       {"dual_infeasibility", r.dual_infeasibility},
                       {"mu", r.mu}});
    }
    j["history"] = std::move(h);
  }
  return j;
}

Json bound_result_to_json(const SeparableBoundResult& r) {
  Json constraints = Json::array();
  for (const auto& c : r.constraints) {
    constraints.push_back(
        Json{{"label", c.label}, {"slack", c.slack}, {"multiplier", c.multiplier}, {"active", c.active}});
  }
  return Json{{"s_sep_max", r.s_sep_max},
              {"s_sep_max_raw", r.s_sep_max_raw},
              {"dual_bound", r.dual_bound},
              {"p_star", r.p_star},
              {"p_star_clipped", r.p_star_clipped},
              {"eps11", r.eps11},
              {"eps12", r.eps12},
              {"tail_constant", r.tail_constant},
              {"status", sdp::to_string(r.status)},
              {"message", r.message},
              {"gap", r.gap},
              {"iterations", r.iterations},
              {"constraints", std::move(constraints)},
              {"optimizer", complex_matrix(r.optimizer)}};
}

Json verdict_to_json(const WitnessVerdict& v) {
  auto finite_or_null = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  return Json{{"s_obs", v.s_obs},
              {"s_stderr", v.s_stderr},
              {"bound_qubit_ppt", v.bound_qubit_ppt},
              {"bound_full_ppt", v.bound_full_ppt},
              {"conclusion", to_string(v.conclusion)},
              {"margin_qubit_sigma", finite_or_null(v.margin_qubit_sigma)},
              {"margin_full_sigma", finite_or_null(v.margin_full_sigma)}};
}

void write_bound_curve_csv(std::ostream& os, std::span<const BoundCurvePoint> curve) {
  os << kBoundCurveHeader << '\n';
  for (const auto& p : curve) {
    os << format_double(p.p_star) << ',' << format_double(p.qubit_ppt) << ',' << format_double(p.full_ppt) << '\n';
  }
}

std::vector<BoundCurvePoint> parse_bound_curve_csv(std::istream& is, const std::string& source) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != kBoundCurveHeader) {
    throw ParseError(source, 1, std::string("expected header '") + kBoundCurveHeader + "'");
  }
  std::vector<BoundCurvePoint> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3) throw ParseError(source, lineno, "expected 3 fields");
    out.push_back({parse_number<double>(f[0], source, lineno, "p_star"),
                   parse_number<double>(f[1], source, lineno, "s_sep_max_qubit_ppt"),
                   parse_number<double>(f[2], source, lineno, "s_sep_max_full_ppt")});
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace homowit::io
