#include "lrghz/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "lrghz/error.hpp"

namespace lrghz {

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

Json region_json(const Region& region) {
  return Json{{"anchor", region.anchor}, {"side", region.side}};
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw Error(ErrorCode::kShapeMismatch, "CSV row width differs from header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << "\r\n";
}

Json to_json(const ScheduleNode& node) {
  Json j;
  j["r"] = node.r;
  j["r1"] = node.r1;
  j["m"] = node.m;
  j["t1"] = node.t1;
  j["t2"] = node.t2;
  j["t_total"] = node.t_total;
  j["bound"] = node.bound;
  j["certified"] = node.certified();
  j["forced"] = node.forced;
  j["child_count"] = node.child_count;
  j["children"] = Json::array();
  if (node.child) j["children"].push_back(to_json(*node.child));
  return j;
}

Json to_json(const SchedulePlan& plan) {
  const RegimeParams& p = plan.params;
  Json params;
  params["alpha"] = p.alpha;
  params["d"] = p.d;
  params["regime"] = to_string(p.regime);
  params["K_alpha"] = p.K_alpha;
  params["kappa_alpha"] = p.kappa_alpha;
  params["kappa_log_base"] = p.kappa_log_base;
  params["gamma"] = p.gamma;
  params["lambda"] = p.lambda;
  params["r0"] = p.r0;
  params["t_base"] = p.t_base;
  params["constant_m"] = p.constant_m;

  Json j;
  j["params"] = params;
  j["mode"] = to_string(plan.mode);
  j["q"] = plan.q;
  j["depth"] = plan.depth();
  j["target_r"] = plan.target_r;
  j["target_time"] = plan.target_time;
  j["certified"] = plan.certified();
  j["warnings"] = plan.warnings;
  j["tree"] = to_json(plan.root());
  return j;
}

Json to_json(const ProtocolTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps) {
    Json regions = Json::array();
    for (const auto& region : s.regions) regions.push_back(region_json(region));
    steps.push_back(Json{{"step", static_cast<int>(s.step)},
                         {"level", s.level},
                         {"depth", s.depth},
                         {"inverse", s.inverse},
                         {"start", s.start},
                         {"duration", s.duration},
                         {"fidelity", optional_number(s.fidelity)},
                         {"merge_deviation", optional_number(s.merge_deviation)},
                         {"regions", regions}});
  }
  Json j;
  j["final_fidelity"] = trace.final_fidelity;
  j["total_time"] = trace.total_time;
  j["forced_m"] = trace.forced_m;
  j["steps"] = steps;
  return j;
}

Json to_json(const std::vector<ScalingRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back(Json{{"alpha", row.alpha},
                       {"d", row.d},
                       {"r", row.r},
                       {"t_protocol", row.t_protocol},
                       {"t_bound", row.t_bound},
                       {"t_prev_best", optional_number(row.t_prev_best)},
                       {"t_lightcone", optional_number(row.t_lightcone)},
                       {"regime", to_string(row.regime)},
                       {"mode", to_string(row.mode)},
                       {"certified", row.certified}});
  }
  return out;
}

Json to_json(const SpeedupReport& report) {
  Json j;
  j["alpha"] = report.alpha;
  j["d"] = report.d;
  j["r"] = report.r;
  j["t_protocol"] = report.t_protocol;
  j["t_prev_best"] = report.t_prev_best;
  j["ratio"] = report.ratio;
  j["prev_exponent"] = report.prev_exponent;
  j["classification"] = to_string(report.classification);
  j["speedup_exponent"] = report.speedup_exponent;
  j["crossover_r"] = optional_number(report.crossover_r);
  j["window_exponents"] = report.window_exponents;
  j["window_ratios"] = report.window_ratios;
  return j;
}

Json to_json(const std::vector<GateBoundRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back(Json{{"n", row.n}, {"t_star", row.t_star}, {"lower", row.lower}, {"upper", row.upper}, {"gap", row.gap}});
  }
  return out;
}

void write_csv(std::ostream& out, const SchedulePlan& plan) {
  CsvWriter w(out, {"level", "r", "r1", "m", "t1", "t2", "t_total", "bound", "certified", "forced"});
  for (std::size_t i = 0; i < plan.levels.size(); ++i) {
    const ScheduleNode& n = *plan.levels[i];
    w.row({std::to_string(i), format_number(n.r), format_number(n.r1), format_number(n.m), format_number(n.t1),
           format_number(n.t2), format_number(n.t_total), format_number(n.bound), n.certified() ? "true" : "false",
           n.forced ? "true" : "false"});
  }
}

void write_csv(std::ostream& out, const ProtocolTrace& trace) {
  CsvWriter w(out, {"step", "level", "depth", "inverse", "time", "duration", "fidelity", "merge_deviation"});
  for (const auto& s : trace.steps) {
    w.row({std::to_string(static_cast<int>(s.step)), std::to_string(s.level), std::to_string(s.depth),
           s.inverse ? "true" : "false", format_number(s.start + s.duration), format_number(s.duration),
           optional_field(s.fidelity), optional_field(s.merge_deviation)});
  }
}

void write_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  CsvWriter w(out, {"alpha", "d", "r", "t_protocol", "t_bound", "t_prev_best", "t_lightcone", "regime", "mode",
                    "certified"});
  for (const auto& row : rows) {
    w.row({format_number(row.alpha), std::to_string(row.d), format_number(row.r), format_number(row.t_protocol),
           format_number(row.t_bound), optional_field(row.t_prev_best), optional_field(row.t_lightcone),
           std::string(to_string(row.regime)), std::string(to_string(row.mode)), row.certified ? "true" : "false"});
  }
}

void write_csv(std::ostream& out, const std::vector<GateBoundRow>& rows) {
  CsvWriter w(out, {"n", "t_star", "lower", "upper", "gap"});
  for (const auto& row : rows) {
    w.row({format_number(row.n), format_number(row.t_star), format_number(row.lower), format_number(row.upper),
           format_number(row.gap)});
  }
}

void write_state_csv(std::ostream& out, const StateVector& state, double threshold) {
  CsvWriter w(out, {"basis", "real", "imag"});
  for (Eigen::Index i = 0; i < state.amps.size(); ++i) {
    const auto a = state.amps[i];
    if (std::abs(a) <= threshold) continue;
    w.row({basis_label(state, static_cast<std::size_t>(i)), format_number(a.real()), format_number(a.imag())});
  }
}

Json state_to_json(const StateVector& state, double threshold) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < state.amps.size(); ++i) {
    const auto a = state.amps[i];
    if (std::abs(a) <= threshold) continue;
    out.push_back(Json{{"basis", basis_label(state, static_cast<std::size_t>(i))}, {"real", a.real()}, {"imag", a.imag()}});
  }
  return out;
}

std::map<std::string, std::string> parse_key_value(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || trim(t.substr(0, eq)).empty()) {
      throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(lineno) + " is not key=value");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config file " + path);
  return parse_key_value(in);
}

}  // namespace lrghz
