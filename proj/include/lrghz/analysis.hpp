#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrghz/scheduler.hpp"

namespace lrghz {

struct ScalingRow {
  double alpha = 0.0;
  int d = 1;
  double r = 0.0;
  double t_protocol = 0.0;
  double t_bound = 0.0;                  // K_alpha * envelope(r)
  std::optional<double> t_prev_best;     // unit prefactor
  std::optional<double> t_lightcone;     // unit prefactor
  Regime regime = Regime::kPower;
  PlanMode mode = PlanMode::kIntegerExact;
  bool certified = false;                // t_protocol <= t_bound
};

// One row per (alpha, r). With `preferred` == kIntegerExact a row is computed
// exactly when r is reachable and falls back to continuous-analytic otherwise.
std::vector<ScalingRow> scaling_sweep(const std::vector<double>& alphas, int d,
                                      const std::vector<double>& r_values,
                                      PlanMode preferred = PlanMode::kIntegerExact,
                                      const PlanOptions& base = {});

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log t against log r over the rows with r >= r_max / 10^window_decades.
double tail_exponent(const std::vector<ScalingRow>& rows, double window_decades = 1.0);

// Continuous-analytic protocol time sampled log-uniformly on [r_lo, r_hi].
struct Curve {
  std::vector<double> r;
  std::vector<double> t;
};
Curve protocol_curve(double alpha, int d, double r_lo, double r_hi, int samples,
                     const PlanOptions& base = {});

// Fitted power-law exponent of the continuous protocol time over each decade
// [10^k, 10^{k+1}] for k = first_decade .. last_decade - 1.
std::vector<double> decade_exponents(double alpha, int d, int first_decade, int last_decade,
                                     int samples_per_decade = 16, const PlanOptions& base = {});

// Slope of log t against sqrt(log r) on [r_lo, r_hi] (the alpha = 2d diagnostic).
double sqrt_log_slope(double alpha, int d, double r_lo, double r_hi, int samples = 64,
                      const PlanOptions& base = {});

enum class SpeedupClass { kPolynomial, kSuperpolynomial };

std::string_view to_string(SpeedupClass c);

struct SpeedupReport {
  double alpha = 0.0;
  int d = 1;
  double r = 0.0;
  double t_protocol = 0.0;
  double t_prev_best = 0.0;
  double ratio = 1.0;               // t_prev_best / t_protocol
  double prev_exponent = 0.0;       // exponent of the previous-best curve
  std::vector<double> window_exponents;  // protocol exponent per decade window
  std::vector<double> window_ratios;     // ratio at the end of each window
  SpeedupClass classification = SpeedupClass::kPolynomial;
  double speedup_exponent = 0.0;    // prev - protocol, polynomial case
  std::optional<double> crossover_r;  // ratio >= 1 for every sample beyond
};

// Compares against the previous-best encoding protocol. The classification is
// evidence from fits over decade windows up to 1e150, not a proof.
SpeedupReport speedup_report(double alpha, int d, double r, const PlanOptions& base = {});

struct GateBoundRow {
  double n = 1.0;
  double t_star = 0.0;
  double lower = 1.0;  // Omega(n) marker
  double upper = 1.0;  // leading-order Trotter count at t_star
  double gap = 1.0;    // upper / lower
};

std::vector<GateBoundRow> gate_bound_table(double alpha, int d, const std::vector<double>& n_values);

}  // namespace lrghz
