#include "lrghz/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "lrghz/analysis.hpp"
#include "lrghz/io.hpp"
#include "lrghz/protocol.hpp"
#include "lrghz/simulator.hpp"

namespace lrghz {

namespace {

constexpr int kMaxSweepPoints = 10000;
constexpr int kMaxBoundsRows = 10000;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, what + ": '" + text + "' is not a finite number");
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, what + ": '" + text + "' is not an integer");
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_double(p, what));
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, what + " is empty");
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_int(p, what));
  return out;
}

Coord parse_site(const std::string& text, int d) {
  if (text.empty()) return Coord(static_cast<std::size_t>(d), 0);
  Coord c;
  for (std::int64_t v : parse_ints(text, "site")) {
    if (v < 0 || v > std::numeric_limits<int>::max()) throw Error(ErrorCode::kOutOfBounds, "site coordinate out of range");
    c.push_back(static_cast<int>(v));
  }
  if (static_cast<int>(c.size()) != d) {
    throw Error(ErrorCode::kShapeMismatch, "site '" + text + "' needs " + std::to_string(d) + " coordinates");
  }
  return c;
}

PlanOptions plan_options(const RunConfig& cfg) {
  PlanOptions o;
  if (cfg.mode == "integer") {
    o.mode = PlanMode::kIntegerExact;
  } else if (cfg.mode == "continuous") {
    o.mode = PlanMode::kContinuous;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "mode must be integer or continuous");
  }
  o.r0 = cfg.r0;
  o.K_alpha = cfg.k_alpha;
  o.constant_m = cfg.constant_m;
  o.kappa_log_base = cfg.kappa_base;
  o.q = cfg.q;
  if (!cfg.force_m.empty()) o.forced_m = parse_ints(cfg.force_m, "force-m");
  return o;
}

int lattice_side(double r) {
  if (!(r >= 1.0) || r > std::numeric_limits<int>::max() || r != std::floor(r)) {
    throw Error(ErrorCode::kInvalidArgument, "simulated side r must be a positive integer");
  }
  return static_cast<int>(r);
}

// Lattice and integer-exact plan for the statevector subcommands.
struct SimulationSetup {
  LatticeSpec lattice;
  std::shared_ptr<const SchedulePlan> plan;
  StateVector state;
};

SimulationSetup prepare(const RunConfig& cfg, const Coord& info_site) {
  if (cfg.mode != "integer") throw Error(ErrorCode::kInvalidArgument, "simulation needs integer mode");
  LatticeSpec lattice{cfg.d, lattice_side(cfg.r), cfg.q};
  lattice.validate();
  checked_dimension(cfg.q, lattice.site_count(), cfg.mem_cap);
  // The q x q gate matrices count against the same cap.
  if (static_cast<std::size_t>(cfg.q) > cfg.mem_cap / static_cast<std::size_t>(cfg.q)) {
    throw Error(ErrorCode::kMemoryCap, "q x q gate exceeds the cap of " + std::to_string(cfg.mem_cap) + " amplitudes");
  }
  auto p = std::make_shared<const SchedulePlan>(plan(cfg.alpha, cfg.d, cfg.r, plan_options(cfg)));
  if (!lattice.contains(info_site)) throw Error(ErrorCode::kOutOfBounds, "information site outside the lattice");

  const auto coeffs = parse_coefficients(cfg.coeff, cfg.q);
  CVector<double> c(cfg.q);
  for (int k = 0; k < cfg.q; ++k) c[k] = coeffs[static_cast<std::size_t>(k)];
  std::vector<CVector<double>> sites(lattice.site_count(), level_state<double>(cfg.q, 0));
  sites[lattice.flat_index(info_site)] = c;
  return {lattice, p, init_product<double>(lattice, sites, cfg.mem_cap)};
}

void emit(const RunConfig& cfg, const std::function<void(std::ostream&)>& write_json,
          const std::function<void(std::ostream&)>& write_table, std::ostream& out,
          const CliEnvironment& env) {
  if (cfg.format != "json" && cfg.format != "csv") {
    throw Error(ErrorCode::kInvalidArgument, "format must be json or csv");
  }
  std::string path = cfg.out;
  if (path.empty() && env.out_dir) path = cfg.subcommand + "." + cfg.format;
  if (!path.empty() && env.out_dir && std::filesystem::path(path).is_relative()) {
    path = (std::filesystem::path(*env.out_dir) / path).string();
  }
  std::ostringstream buf;
  (cfg.format == "json" ? write_json : write_table)(buf);
  if (path.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << buf.str()) || !file.flush()) throw Error(ErrorCode::kIo, "cannot write " + path);
}

void dump_state(const RunConfig& cfg, const StateVector& state, const CliEnvironment& env) {
  if (cfg.dump_state.empty()) return;
  std::string path = cfg.dump_state;
  if (env.out_dir && std::filesystem::path(path).is_relative()) {
    path = (std::filesystem::path(*env.out_dir) / path).string();
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_state_csv(file, state, cfg.dump_threshold);
  if (!file.flush()) throw Error(ErrorCode::kIo, "cannot write " + path);
}

std::function<void(std::ostream&)> json_writer(const Json& j) {
  return [j](std::ostream& os) { os << j.dump(2) << '\n'; };
}

void cmd_plan(const RunConfig& cfg, std::ostream& out, const CliEnvironment& env) {
  const SchedulePlan p = plan(cfg.alpha, cfg.d, cfg.r, plan_options(cfg));
  emit(cfg, json_writer(to_json(p)), [&](std::ostream& os) { write_csv(os, p); }, out, env);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out, const CliEnvironment& env) {
  const Coord c = parse_site(cfg.site, cfg.d);
  SimulationSetup s = prepare(cfg, c);
  ProtocolOptions opts;
  opts.qubit_dft = cfg.qubit_dft;
  const ProtocolTrace trace = encode(s.state, EncodeRequest{s.lattice, Region::whole(s.lattice), c, s.plan}, opts);
  emit(cfg, json_writer(to_json(trace)), [&](std::ostream& os) { write_csv(os, trace); }, out, env);
  dump_state(cfg, s.state, env);
}

void cmd_transfer(const RunConfig& cfg, std::ostream& out, const CliEnvironment& env) {
  const Coord c = parse_site(cfg.site, cfg.d);
  SimulationSetup s = prepare(cfg, c);
  if (cfg.to.empty()) throw Error(ErrorCode::kInvalidArgument, "transfer needs --to");
  const Coord dest = parse_site(cfg.to, cfg.d);
  ProtocolOptions opts;
  opts.qubit_dft = cfg.qubit_dft;
  const ProtocolTrace trace = state_transfer(s.state, s.lattice, c, dest, Region::whole(s.lattice), s.plan, opts);
  emit(cfg, json_writer(to_json(trace)), [&](std::ostream& os) { write_csv(os, trace); }, out, env);
  dump_state(cfg, s.state, env);
}

std::vector<double> sweep_sizes(const RunConfig& cfg) {
  if (!cfg.r_values.empty()) {
    auto r = parse_doubles(cfg.r_values, "r-values");
    if (r.size() > kMaxSweepPoints) throw Error(ErrorCode::kInvalidArgument, "too many sweep points");
    return r;
  }
  if (cfg.points < 2 || cfg.points > kMaxSweepPoints || !(cfg.r_min >= 1.0) || !(cfg.r_max > cfg.r_min) ||
      !std::isfinite(cfg.r_max)) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs --r-values or 1 <= r-min < r-max with 2..10000 points");
  }
  std::vector<double> r;
  const double lo = std::log(cfg.r_min);
  const double hi = std::log(cfg.r_max);
  for (int k = 0; k < cfg.points; ++k) r.push_back(k + 1 == cfg.points ? cfg.r_max : std::exp(lo + (hi - lo) * k / (cfg.points - 1)));
  return r;
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out, const CliEnvironment& env) {
  const std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>{cfg.alpha} : parse_doubles(cfg.alphas, "alphas");
  if (alphas.size() > 1000) throw Error(ErrorCode::kInvalidArgument, "too many alphas");
  const PlanOptions opts = plan_options(cfg);
  if (cfg.speedup) {
    if (cfg.r < 1.0) throw Error(ErrorCode::kInvalidArgument, "speedup report needs --r >= 1");
    std::vector<SpeedupReport> reports;
    for (double a : alphas) reports.push_back(speedup_report(a, cfg.d, cfg.r, opts));
    Json j = Json::array();
    for (const auto& rep : reports) j.push_back(to_json(rep));
    emit(cfg, json_writer(j),
         [&](std::ostream& os) {
           CsvWriter w(os, {"alpha", "d", "r", "ratio", "prev_exponent", "classification", "speedup_exponent", "crossover_r"});
           for (const auto& rep : reports) {
             w.row({format_number(rep.alpha), std::to_string(rep.d), format_number(rep.r), format_number(rep.ratio),
                    format_number(rep.prev_exponent), std::string(to_string(rep.classification)),
                    format_number(rep.speedup_exponent), rep.crossover_r ? format_number(*rep.crossover_r) : ""});
           }
         },
         out, env);
    return;
  }
  const auto rows = scaling_sweep(alphas, cfg.d, sweep_sizes(cfg), opts.mode, opts);
  emit(cfg, json_writer(to_json(rows)), [&](std::ostream& os) { write_csv(os, rows); }, out, env);
}

void cmd_bounds(const RunConfig& cfg, std::ostream& out, const CliEnvironment& env) {
  const auto n = parse_doubles(cfg.n_values, "n");
  if (n.size() > kMaxBoundsRows) throw Error(ErrorCode::kInvalidArgument, "too many n values");
  for (double v : n) {
    if (!(v >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  }
  const auto rows = gate_bound_table(cfg.alpha, cfg.d, n);
  emit(cfg, json_writer(to_json(rows)), [&](std::ostream& os) { write_csv(os, rows); }, out, env);
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--config", "key=value file; explicit flags take precedence");
  sub->add_option("--alpha", cfg.alpha, "power-law exponent")->required();
  sub->add_option("--d", cfg.d, "lattice dimension");
  sub->add_option("--q", cfg.q, "levels per site");
  sub->add_option("--r0", cfg.r0, "base cube side (0 = regime default)");
  sub->add_option("--force-m", cfg.force_m, "merge factors bottom-up, e.g. 2,2");
  sub->add_option("--mode", cfg.mode, "integer or continuous");
  sub->add_option("--k-alpha", cfg.k_alpha, "prefactor override");
  sub->add_option("--constant-m", cfg.constant_m, "power-regime merge factor");
  sub->add_option("--kappa-base", cfg.kappa_base, "log base b in kappa = log b / log lambda, 3 < b <= 4");
  sub->add_option("--format", cfg.format, "json or csv");
  sub->add_option("--out", cfg.out, "output file (stdout by default)");
}

void add_state_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--r", cfg.r, "lattice side")->required();
  sub->add_option("--coeff", cfg.coeff, "a0,a1,... or random:SEED");
  sub->add_option("--site", cfg.site, "information site, comma-separated coordinates");
  sub->add_option("--dump-state", cfg.dump_state, "write the final amplitudes as CSV to this path");
  sub->add_option("--dump-threshold", cfg.dump_threshold, "skip amplitudes at or below this magnitude");
  sub->add_option("--mem-cap", cfg.mem_cap, "maximum number of amplitudes");
  sub->add_flag("--qubit-dft", cfg.qubit_dft, "use the 2-point DFT gate in place of the Hadamard");
}

// Splices config-file entries in as --key=value right after the subcommand so
// that later explicit flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (!path || args.empty()) return args;
  std::vector<std::string> merged{args[0]};
  for (const auto& [key, value] : read_key_value_file(*path)) {
    if (key == "config") throw Error(ErrorCode::kInvalidArgument, "config files cannot include other config files");
    merged.push_back("--" + key + "=" + value);
  }
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

void report_error(std::ostream& err, const std::string& kind, int code, const std::string& message) {
  err << Json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int exit_code(ErrorCode code) {
  return kExitErrorBase + static_cast<int>(code);
}

std::vector<std::complex<double>> parse_coefficients(const std::string& text, int q) {
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "levels per site must be >= 2");
  std::vector<std::complex<double>> c;
  if (text.rfind("random:", 0) == 0) {
    const std::int64_t seed = parse_int(text.substr(7), "random seed");
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> normal;
    double norm = 0.0;
    while (norm < 1e-12) {
      c.clear();
      norm = 0.0;
      for (int k = 0; k < q; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        c.emplace_back(re, im);
        norm += re * re + im * im;
      }
    }
    for (auto& v : c) v /= std::sqrt(norm);
    return c;
  }
  for (double v : parse_doubles(text, "coeff")) c.emplace_back(v, 0.0);
  if (static_cast<int>(c.size()) != q) {
    throw Error(ErrorCode::kShapeMismatch, "coeff needs " + std::to_string(q) + " values");
  }
  double norm = 0.0;
  for (const auto& v : c) norm += std::norm(v);
  if (std::abs(norm - 1.0) > 1e-10) throw Error(ErrorCode::kNotNormalized, "coefficients must have unit norm");
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliEnvironment& env) {
  RunConfig cfg;
  if (env.mem_cap) cfg.mem_cap = *env.mem_cap;

  CLI::App app{"Recursive GHZ-encoding planner and simulator for power-law interacting lattices", "lrghz"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* plan_cmd = app.add_subcommand("plan", "emit the recursion schedule");
  add_common(plan_cmd, cfg);
  plan_cmd->add_option("--r", cfg.r, "target cube side")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "run the encoding protocol on a statevector");
  add_common(sim_cmd, cfg);
  add_state_options(sim_cmd, cfg);

  auto* xfer_cmd = app.add_subcommand("transfer", "move a site state across the lattice in time 2t");
  add_common(xfer_cmd, cfg);
  add_state_options(xfer_cmd, cfg);
  xfer_cmd->add_option("--to", cfg.to, "destination site")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "protocol time against cube side");
  add_common(sweep_cmd, cfg);
  sweep_cmd->add_option("--alphas", cfg.alphas, "comma-separated exponents (default: --alpha)");
  sweep_cmd->add_option("--r-values", cfg.r_values, "comma-separated sides");
  sweep_cmd->add_option("--r-min", cfg.r_min, "smallest side of a log-spaced grid");
  sweep_cmd->add_option("--r-max", cfg.r_max, "largest side of a log-spaced grid");
  sweep_cmd->add_option("--points", cfg.points, "grid size");
  sweep_cmd->add_option("--r", cfg.r, "side for --speedup");
  sweep_cmd->add_flag("--speedup", cfg.speedup, "emit speedup reports against the previous-best protocol");

  auto* bounds_cmd = app.add_subcommand("bounds", "gate-count bound table");
  add_common(bounds_cmd, cfg);
  bounds_cmd->add_option("--n", cfg.n_values, "comma-separated site counts");

  try {
    std::vector<std::string> argv = merge_config(args);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
    if (env.mem_cap) cfg.mem_cap = std::min(cfg.mem_cap, *env.mem_cap);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "plan") {
      cmd_plan(cfg, out, env);
    } else if (cfg.subcommand == "simulate") {
      cmd_simulate(cfg, out, env);
    } else if (cfg.subcommand == "transfer") {
      cmd_transfer(cfg, out, env);
    } else if (cfg.subcommand == "sweep") {
      cmd_sweep(cfg, out, env);
    } else {
      cmd_bounds(cfg, out, env);
    }
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", kExitUsage, e.what());
    return kExitUsage;
  } catch (const Error& e) {
    const int code = exit_code(e.code());
    report_error(err, std::string(to_string(e.code())), code, e.what());
    return code;
  } catch (const std::exception& e) {
    report_error(err, "internal", kExitInternal, e.what());
    return kExitInternal;
  }
}

}  // namespace lrghz
