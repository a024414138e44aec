// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/pipeline.hpp"

#include "homowit/log.hpp"
#include "homowit/parallel.hpp"
#include "homowit/random.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#ifndef HOMOWIT_VERSION
#define HOMOWIT_VERSION "0.0.0"
#endif

namespace homowit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMinCurvePoints = 50;
constexpr double kCurveSlack = 1e-9;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_value(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid value '" + t + "' for key '" + std::string(key) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean '" + t + "' for key '" + std::string(key) + "'");
}

// "0,5,10" or "start:stop:step" (inclusive).
std::vector<double> parse_thetas(std::string_view text) {
  const std::string t = trim(text);
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_value<double>("theta", item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ConfigError("theta range must be start:stop:step with step > 0");
    }
    const auto n = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(parts[0] + k * parts[2]);
  } else {
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_value<double>("theta", item));
  }
  if (out.empty()) throw ConfigError("theta list is empty");
  return out;
}

std::string theta_text(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", theta);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, double theta, std::uint64_t purpose) {
  return make_stream(seed, std::bit_cast<std::uint64_t>(theta), purpose)();
}

LocalMarginals marginals_from(const PhotonNumberDistribution& a, const PhotonNumberDistribution& b) {
  auto clip = [](double v) { return std::clamp(v, 0.0, 1.0); };
  LocalMarginals m;
  m.p_a = {clip(a.p[0]), clip(a.p[1]), clip(a.p_tail)};
  m.p_b = {clip(b.p[0]), clip(b.p[1]), clip(b.p_tail)};
  m.delta_a = {a.delta_p[0], a.delta_p[1], a.delta_p_tail};
  m.delta_b = {b.delta_p[0], b.delta_p[1], b.delta_p_tail};
  return m;
}

io::Json correlator_json(const Correlator& c) {
  return io::Json{{"value", c.value}, {"std_error", c.std_error}, {"n_events", c.n_events}};
}

}  // namespace

void RunConfig::set(std::string_view raw_key, std::string_view value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "theta" || key == "thetas") {
    thetas = parse_thetas(value);
  } else if (key == "events") {
    events = parse_value<std::size_t>(key, value);
  } else if (key == "eta_a") {
    eta_a = parse_value<double>(key, value);
  } else if (key == "eta_b") {
    eta_b = parse_value<double>(key, value);
  } else if (key == "eta") {
    eta_a = eta_b = parse_value<double>(key, value);
  } else if (key == "angle_error_deg") {
    angle_error_deg = parse_value<double>(key, value);
  } else if (key == "seed") {
    seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "mode") {
    const std::string t = trim(value);
    if (t == "simulate") {
      source = DataSource::Simulate;
    } else if (t == "ingest") {
      source = DataSource::Ingest;
    } else {
      throw ConfigError("mode must be simulate or ingest, got '" + t + "'");
    }
  } else if (key == "input" || key == "in") {
    input = trim(value);
  } else if (key == "out" || key == "out_dir") {
    out_dir = trim(value);
  } else if (key == "dim") {
    dim = parse_value<int>(key, value);
  } else if (key == "tomo_levels") {
    tomo_levels = parse_value<int>(key, value);
  } else if (key == "tomo_guard") {
    tomo_guard = parse_value<int>(key, value);
  } else if (key == "bootstrap_rounds") {
    bootstrap_rounds = parse_value<int>(key, value);
  } else if (key == "curve_points") {
    curve_points = parse_value<int>(key, value);
  } else if (key == "check_angle_corners") {
    check_angle_corners = parse_bool(key, value);
  } else if (key == "solver_tol") {
    solver_tol = parse_value<double>(key, value);
  } else if (key == "solver_max_iter") {
    solver_max_iter = parse_value<int>(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::string th;
  for (std::size_t k = 0; k < thetas.size(); ++k) th += (k ? "," : "") + io::format_double(thetas[k]);
  return {{"theta", th},
          {"events", std::to_string(events)},
          {"eta_a", io::format_double(eta_a)},
          {"eta_b", io::format_double(eta_b)},
          {"angle_error_deg", io::format_double(angle_error_deg)},
          {"seed", std::to_string(seed)},
          {"mode", source == DataSource::Simulate ? "simulate" : "ingest"},
          {"input", input},
          {"out", out_dir},
          {"dim", std::to_string(dim)},
          {"tomo_levels", std::to_string(tomo_levels)},
          {"tomo_guard", std::to_string(tomo_guard)},
          {"bootstrap_rounds", std::to_string(bootstrap_rounds)},
          {"curve_points", std::to_string(curve_points)},
          {"check_angle_corners", check_angle_corners ? "true" : "false"},
          {"solver_tol", io::format_double(solver_tol)},
          {"solver_max_iter", std::to_string(solver_max_iter)}};
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (thetas.empty()) fail("at least one theta is required");
  for (double t : thetas)
    if (!(t >= 0.0 && t <= 45.0)) fail("theta must lie in [0, 45] degrees, got " + theta_text(t));
  if (events < 1000) fail("events must be at least 1000 for tomography");
  if (!(eta_a >= 0.0 && eta_a <= 1.0) || !(eta_b >= 0.0 && eta_b <= 1.0)) fail("eta_a and eta_b must lie in [0, 1]");
  if (!(angle_error_deg >= 0.0 && angle_error_deg <= 45.0)) fail("angle_error_deg must lie in [0, 45]");
  if (dim < kBoundModeDim || dim > kMaxModeDim) {
    fail("dim must lie in [" + std::to_string(kBoundModeDim) + ", " + std::to_string(kMaxModeDim) + "]");
  }
  if (tomo_levels < 2 || tomo_levels > kMaxTomoLevels) {
    fail("tomo_levels must lie in [2, " + std::to_string(kMaxTomoLevels) + "]");
  }
  if (tomo_guard < 0 || tomo_levels + tomo_guard > kMaxTomoLevels + 4) fail("tomo_guard out of range");
  if (bootstrap_rounds < 2) fail("bootstrap_rounds must be at least 2");
  if (curve_points < kMinCurvePoints) fail("curve_points must be at least " + std::to_string(kMinCurvePoints));
  if (!(solver_tol > 0.0) || solver_max_iter < 1) fail("solver_tol must be positive and solver_max_iter >= 1");
  if (out_dir.empty()) fail("output directory must not be empty");
  if (source == DataSource::Ingest) {
    if (input.empty()) fail("ingest mode needs an input path");
    if (!std::filesystem::exists(input)) fail("input '" + input + "' does not exist");
  }
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      base.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

BipartiteFockState simulated_state(double theta_deg, const RunConfig& config) {
  return apply_loss(make_tunable_state(theta_deg, config.dim), config.eta_a, config.eta_b);
}

std::vector<QuadratureRecord> simulate_records(double theta_deg, const RunConfig& config) {
  const auto rho = simulated_state(theta_deg, config);
  const MeasurementConfig mc;
  const std::uint64_t seed = derive_seed(config.seed, theta_deg, 1);
  const auto n = config.events;
  auto out = sample_events(rho, mc, {1, 1}, n, seed, 0);
  const auto second = sample_events(rho, mc, {1, 2}, n, seed, static_cast<std::int64_t>(n));
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

ThetaReport witness_from_records(std::span<const QuadratureRecord> records, const RunConfig& config,
                                 double theta_deg) {
  ThetaReport rep;
  rep.theta_deg = theta_deg;
  rep.n_records = records.size();
  rep.s_theory = kNaN;
  std::string stage = "records";
  try {
    std::vector<QuadratureRecord> r11, r12;
    std::vector<double> xa, xb;
    xa.reserve(records.size());
    xb.reserve(records.size());
    for (const auto& r : records) {
      const int slot = MeasurementConfig::slot({r.setting_a, r.setting_b});
      if (slot == 0) r11.push_back(r);
      if (slot == 1) r12.push_back(r);
      xa.push_back(r.x_a);
      xb.push_back(r.x_b);
    }
    if (r11.size() < 2 || r12.size() < 2) {
      throw std::invalid_argument("records for setting pairs (1,1) and (1,2) are required");
    }

    // Step 1: local photon-number distributions.
    stage = "tomography";
    const auto kernel = ReconstructionKernel::build(config.tomo_levels, config.tomo_guard);
    rep.dist_a = estimate_with_errors(xa, kernel, Party::A, config.bootstrap_rounds,
                                      derive_seed(config.seed, theta_deg, 2));
    rep.dist_b = estimate_with_errors(xb, kernel, Party::B, config.bootstrap_rounds,
                                      derive_seed(config.seed, theta_deg, 3));

    // Step 2: p*.
    stage = "p_star";
    rep.p_star = p_star(rep.dist_a, rep.dist_b);
    if (rep.p_star.clipped) warn("p* estimate was negative and has been clipped to 0");

    // Step 3: separable bounds.
    stage = "bound";
    BoundRequest req;
    req.mode = BoundMode::Experiment;
    req.p_star = std::min(1.0, rep.p_star.value);
    req.delta_p_star = rep.p_star.delta;
    req.marginals = marginals_from(rep.dist_a, rep.dist_b);
    req.angle_error_bound = config.angle_error_deg * std::numbers::pi / 180.0;
    req.solver = config.solver();
    req.experiment_ppt = PptScope::QubitSubspace;
    rep.bound_qubit = separable_bound(req);
    if (!rep.bound_qubit.ok()) {
      throw std::runtime_error(std::string("qubit-subspace bound: ") + sdp::to_string(rep.bound_qubit.status) + ": " +
                               rep.bound_qubit.message);
    }
    req.experiment_ppt = PptScope::Full;
    rep.bound_full = separable_bound(req);
    if (!rep.bound_full.ok()) {
      throw std::runtime_error(std::string("full bound: ") + sdp::to_string(rep.bound_full.status) + ": " +
                               rep.bound_full.message);
    }
    if (config.check_angle_corners) {
      req.experiment_ppt = PptScope::QubitSubspace;
      rep.corners = angle_corner_check(req);
      if (!rep.corners->extremal) warn("angle corner (+e, -e) is not the maximizing corner at theta " + theta_text(theta_deg));
    }

    // Step 4: S_obs from two correlators.
    stage = "chsh";
    rep.chsh = chsh_from_two_correlators(correlator(r11), correlator(r12));

    // Step 5: comparison.
    stage = "verdict";
    rep.verdict = verdict(rep.chsh.s_obs, rep.chsh.s_stderr, rep.bound_qubit.s_sep_max, rep.bound_full.s_sep_max);
  } catch (const std::exception& e) {
    rep.error = StageError{stage, e.what()};
  }
  return rep;
}

std::vector<ThetaReport> run_witness(const RunConfig& config) {
  config.validate();
  if (config.source == DataSource::Ingest) {
    const double theta = config.thetas.front();
    try {
      const auto in = ingest(config.input);
      return {witness_from_records(in.records, config, theta)};
    } catch (const std::exception& e) {
      ThetaReport rep;
      rep.theta_deg = theta;
      rep.s_theory = kNaN;
      rep.error = StageError{"ingest", e.what()};
      return {rep};
    }
  }
  std::vector<ThetaReport> reports(config.thetas.size());
  parallel_for(config.thetas.size(), [&](std::size_t k) {
    const double theta = config.thetas[k];
    std::vector<QuadratureRecord> records;
    double s_theory = kNaN;
    try {
      const auto rho = simulated_state(theta, config);
      s_theory = analytic_chsh(rho);
      records = simulate_records(theta, config);
    } catch (const std::exception& e) {
      reports[k].theta_deg = theta;
      reports[k].s_theory = s_theory;
      reports[k].error = StageError{"simulate", e.what()};
      return;
    }
    reports[k] = witness_from_records(records, config, theta);
    reports[k].s_theory = s_theory;
  });
  return reports;
}

std::vector<io::BoundCurvePoint> emit_bound_curve(int points, const sdp::SolverOptions& solver) {
  if (points < kMinCurvePoints) {
    throw std::invalid_argument("bound curve needs at least " + std::to_string(kMinCurvePoints) + " points");
  }
  std::vector<io::BoundCurvePoint> curve(points);
  std::vector<std::string> failures(2 * points);
  parallel_for(2 * static_cast<std::size_t>(points), [&](std::size_t task) {
    const int k = static_cast<int>(task / 2);
    const bool full = task % 2 == 1;
    BoundRequest req;
    req.p_star = static_cast<double>(k) / (points - 1);
    req.mode = full ? BoundMode::FullPpt : BoundMode::QubitSubspacePpt;
    req.solver = solver;
    const auto res = separable_bound(req);
    curve[k].p_star = req.p_star;
    (full ? curve[k].full_ppt : curve[k].qubit_ppt) = res.s_sep_max;
    if (!res.ok()) failures[task] = std::string(to_string(req.mode)) + " at p*=" + io::format_double(req.p_star) + ": " + res.message;
  });
  for (const auto& f : failures)
    if (!f.empty()) throw std::runtime_error("bound curve solve failed, " + f);
  for (int k = 0; k < points; ++k) {
    if (curve[k].full_ppt > curve[k].qubit_ppt + kCurveSlack) {
      throw std::runtime_error("bound curve: full-ppt exceeds qubit-ppt at p*=" + io::format_double(curve[k].p_star));
    }
    if (k > 0 && (curve[k].qubit_ppt < curve[k - 1].qubit_ppt - kCurveSlack ||
                  curve[k].full_ppt < curve[k - 1].full_ppt - kCurveSlack)) {
      throw std::runtime_error("bound curve is not monotone at p*=" + io::format_double(curve[k].p_star));
    }
  }
  return curve;
}

IngestReport ingest(const std::filesystem::path& path) {
  IngestReport rep;
  rep.path = path;
  if (!std::filesystem::is_regular_file(path)) throw std::runtime_error("'" + path.string() + "' is not a file");
  rep.bytes = std::filesystem::file_size(path);
  rep.records = io::read_records_csv(path);
  for (const auto& r : rep.records) ++rep.counts[MeasurementConfig::slot({r.setting_a, r.setting_b})];
  return rep;
}

io::Json report_to_json(const ThetaReport& r) {
  io::Json j{{"theta_deg", r.theta_deg}, {"status", r.ok() ? "ok" : "error"}};
  if (r.error) j["error"] = io::Json{{"stage", r.error->stage}, {"message", r.error->message}};
  j["n_records"] = r.n_records;
  j["s_theory"] = std::isfinite(r.s_theory) ? io::Json(r.s_theory) : io::Json(nullptr);
  if (!r.ok() && r.error->stage != "verdict") return j;
  j["distributions"] = io::distribution_report(r.dist_a, r.dist_b, r.p_star);
  j["bounds"] = io::Json{{"qubit_ppt", io::bound_result_to_json(r.bound_qubit)},
                         {"full_ppt", io::bound_result_to_json(r.bound_full)}};
  if (r.corners) {
    io::Json c = io::Json::array();
    for (int k = 0; k < 4; ++k) {
      c.push_back(io::Json{{"eps11", r.corners->corners[k][0]},
                           {"eps12", r.corners->corners[k][1]},
                           {"s_sep_max", r.corners->values[k]}});
    }
    j["angle_corners"] = io::Json{{"values", c}, {"extremal", r.corners->extremal}};
  }
  j["chsh"] = io::Json{{"e11", correlator_json(r.chsh.e11)},
                       {"e12", correlator_json(r.chsh.e12)},
                       {"s_obs", r.chsh.s_obs},
                       {"s_stderr", r.chsh.s_stderr}};
  if (r.ok()) j["verdict"] = io::verdict_to_json(r.verdict);
  return j;
}

io::Json ingest_report_to_json(const IngestReport& r) {
  io::Json counts;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      counts[std::to_string(a) + std::to_string(b)] = r.counts[MeasurementConfig::slot({a, b})];
    }
  return io::Json{{"path", r.path.string()}, {"bytes", r.bytes}, {"n_records", r.records.size()}, {"counts", counts}};
}

io::Json provenance_json(const RunConfig& config) {
  io::Json cfg;
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  return io::Json{{"tool", "homowit"},
                  {"version", HOMOWIT_VERSION},
                  {"config", cfg},
                  {"records_format", io::kRecordsHeader},
                  {"bound_curve_format", io::kBoundCurveHeader}};
}

std::string theta_table_csv(std::span<const ThetaReport> reports) {
  std::ostringstream os;
  os << "theta_deg,s_obs,s_stderr,s_theory,p_star,delta_p_star,bound_qubit_ppt,bound_full_ppt,conclusion,"
        "margin_qubit_sigma,status\n";
  auto f = io::format_double;
  for (const auto& r : reports) {
    os << f(r.theta_deg) << ',';
    if (r.ok()) {
      os << f(r.chsh.s_obs) << ',' << f(r.chsh.s_stderr) << ',' << f(r.s_theory) << ',' << f(r.p_star.value) << ','
         << f(r.p_star.delta) << ',' << f(r.bound_qubit.s_sep_max) << ',' << f(r.bound_full.s_sep_max) << ','
         << to_string(r.verdict.conclusion) << ',' << f(r.verdict.margin_qubit_sigma) << ",ok\n";
    } else {
      os << "nan,nan," << f(r.s_theory) << ",nan,nan,nan,nan,,nan,error:" << r.error->stage << '\n';
    }
  }
  return os.str();
}

std::string gnuplot_script() {
  return "# gnuplot -persist plot.gp\n"
         "set datafile separator ','\n"
         "set key top left\n"
         "set multiplot layout 1,2\n"
         "set xlabel 'theta (deg)'\n"
         "set ylabel 'S'\n"
         "plot 'theta_table.csv' every ::1 using 1:2:3 with yerrorbars title 'S_obs', \\\n"
         "     '' every ::1 using 1:7 with linespoints title 'separable bound (qubit PPT)', \\\n"
         "     '' every ::1 using 1:8 with linespoints title 'separable bound (full PPT)'\n"
         "set xlabel 'p*'\n"
         "set ylabel 'S_sep^max'\n"
         "plot 'bound_curve.csv' every ::1 using 1:2 with lines dashtype 2 title 'qubit-subspace PPT', \\\n"
         "     '' every ::1 using 1:3 with lines title 'full PPT'\n"
         "unset multiplot\n";
}

void write_run_outputs(const RunConfig& config, std::span<const ThetaReport> reports,
                       std::span<const io::BoundCurvePoint> curve) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  parallel_for(reports.size(), [&](std::size_t k) {
    const auto& r = reports[k];
    io::write_file_atomic(dir / ("verdict_theta_" + theta_text(r.theta_deg) + ".json"),
                          report_to_json(r).dump(2) + "\n");
  });
  io::write_file_atomic(dir / "theta_table.csv", theta_table_csv(reports));
  std::ostringstream curve_csv;
  io::write_bound_curve_csv(curve_csv, curve);
  io::write_file_atomic(dir / "bound_curve.csv", curve_csv.str());
  io::write_file_atomic(dir / "plot.gp", gnuplot_script());
  io::write_file_atomic(dir / "provenance.json", provenance_json(config).dump(2) + "\n");
}

}  // namespace homowit
