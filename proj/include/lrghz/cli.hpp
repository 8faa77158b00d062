#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrghz/error.hpp"
#include "lrghz/scheduler.hpp"

namespace lrghz {

// Process exit codes. Library errors map to 10 + their ErrorCode ordinal.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;     // unknown flag, bad value, missing subcommand
inline constexpr int kExitInternal = 3;  // unexpected exception; indicates a bug
inline constexpr int kExitErrorBase = 10;

int exit_code(ErrorCode code);

struct RunConfig {
  std::string subcommand;
  double alpha = 0.0;
  int d = 1;
  int q = 2;
  double r = 0.0;
  std::int64_t r0 = 0;
  std::string force_m;  // comma-separated merge factors, bottom-up
  std::string mode = "integer";
  std::optional<double> k_alpha;
  std::optional<std::int64_t> constant_m;
  double kappa_base = 4.0;
  std::string coeff = "random:1";  // a_0,..,a_{q-1} or random:SEED
  std::string site;                // information site as "x" or "x,y"; origin by default
  std::string to;                  // transfer target site
  std::string alphas;              // sweep: comma-separated list
  std::string r_values;            // sweep: comma-separated list
  double r_min = 0.0;
  double r_max = 0.0;
  int points = 0;
  bool speedup = false;
  std::string n_values = "10000";  // bounds
  std::string format = "json";
  std::string out;
  std::string dump_state;  // path for the amplitude CSV
  double dump_threshold = 1e-12;
  std::size_t mem_cap = std::size_t{1} << 26;
  bool qubit_dft = false;
};

struct CliEnvironment {
  std::optional<std::string> out_dir;  // LRGHZ_OUT_DIR
  std::optional<std::size_t> mem_cap;  // default and ceiling for --mem-cap
};

// Parses "a0,a1,..." or "random:SEED" into q normalized coefficients. Random
// draws are normalized complex Gaussians from a seeded mt19937_64.
std::vector<std::complex<double>> parse_coefficients(const std::string& text, int q);

// Runs one subcommand. args excludes the program name. The primary artifact
// goes to `out` (or to a file), errors as one JSON line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env = {});

}  // namespace lrghz
