#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lrghz {

// The three power-law regimes with their own merge-factor rule and time
// envelope: d < alpha < 2d, alpha == 2d, 2d < alpha <= 2d+1.
enum class Regime { kPolylog, kStretchedExp, kPower };

std::string_view to_string(Regime regime);

// Tolerance used to decide alpha == 2d.
inline constexpr double kAlphaEqualityTol = 1e-9;

// Throws kUnsupportedRegime outside (d, 2d+1].
Regime classify_regime(double alpha, int d);

// Interval the merge factor m must fall in for a child cube of side r1.
// kPolylog: (r1^{lambda-1}, 2 r1^{lambda-1}]; kStretchedExp:
// [e^{gamma/(2d) sqrt(log r1)}, 2 e^{...}]; kPower: (3^{1/(alpha-2d)}, inf).
struct MergeInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_open = false;
  bool upper_open = false;

  bool contains(double m) const;
};

MergeInterval merge_interval(double alpha, int d, double r1);

// Smallest integer merge factor allowed for a child cube of side r1.
// At alpha == 2d, r1 must be at least ceil(e^{8/d}) (kPrecondition).
std::int64_t choose_m(double alpha, int d, std::int64_t r1);

// Real-valued merge factor used by the continuous-analytic mode: the upper end
// of the interval for the polylog and stretched regimes, the constant integer
// choice for the power regime.
double choose_m_continuous(double alpha, int d, double r1);

// Default constant merge factor for 2d < alpha <= 2d+1.
std::int64_t default_constant_m(double alpha, int d);

// Smallest child side at which choose_m accepts alpha == 2d.
std::int64_t min_stretched_r1(int d);

// pi d^{alpha/2} (m r1)^alpha / V^2 with V = r1^d: the time that gives the
// all-ones branches a relative phase of pi under the uniform merge coupling.
double step2_time(double alpha, int d, double m, double r1);

// Merge duration for q-level sites: the unit-weight phase is 2 pi / q, so this
// is step2_time * 2 / q (identical to step2_time for qubits).
double merge_phase_time(double alpha, int d, double m, double r1, int q);

// Minimum admissible prefactor K_alpha.
//  kPower:        pi d^{alpha/2} m^alpha / (m^{alpha-2d} - 3)     (kPole if m^{alpha-2d} <= 3)
//  kStretchedExp: 2^alpha pi d^{alpha/2} / (e^2 - 3)
//  kPolylog:      pi (2 sqrt d)^alpha / ((b - 3) log^{kappa} r0) with kappa = log b / log lambda
// where b is `kappa_log_base` (4 by default, any value in (3, 4]).
double k_alpha_min(double alpha, int d, double m, double r0 = 2.0, double kappa_log_base = 4.0);

// log b / log(2d/alpha); only meaningful for d < alpha < 2d.
double kappa_alpha(double alpha, int d, double kappa_log_base = 4.0);

struct RegimeParams {
  double alpha = 0.0;
  int d = 1;
  Regime regime = Regime::kPower;
  double kappa_alpha = 0.0;  // polylog regime only
  double gamma = 0.0;        // 3 sqrt(d)
  double lambda = 0.0;       // 2d / alpha
  double K_alpha = 0.0;
  double kappa_log_base = 4.0;
  std::int64_t r0 = 2;
  double t_base = 0.0;
  std::int64_t constant_m = 0;  // power regime only
};

// The regime envelope without its prefactor:
// log^{kappa} r, e^{gamma sqrt(log r)} or r^{alpha-2d}.
double bound_kernel(const RegimeParams& params, double r);

// K_alpha * bound_kernel(r). Throws kUnsupportedRegime outside (d, 2d+1].
double bound_t(double alpha, int d, double r, const RegimeParams& params);

enum class PlanMode { kIntegerExact, kContinuous };

std::string_view to_string(PlanMode mode);

struct PlanOptions {
  PlanMode mode = PlanMode::kIntegerExact;
  // 0 selects the regime default: 2, or ceil(e^{8/d}) at alpha == 2d.
  std::int64_t r0 = 0;
  std::optional<double> K_alpha;  // defaults to k_alpha_min
  std::optional<double> t_base;   // defaults to K_alpha * bound_kernel(r0)
  // Merge factors applied bottom-up before falling back to choose_m.
  std::vector<std::int64_t> forced_m;
  std::optional<std::int64_t> constant_m;  // power-regime override
  double kappa_log_base = 4.0;
  int q = 2;
};

// One level of the recursion. Every child of a node has the same schedule, so
// a node keeps one representative child plus the child count m^d.
struct ScheduleNode {
  double r = 0.0;
  double r1 = 0.0;
  double m = 1.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t_total = 0.0;
  double bound = 0.0;  // K_alpha * bound_kernel(r)
  bool forced = false;
  std::int64_t child_count = 0;
  std::shared_ptr<const ScheduleNode> child;

  bool is_base() const { return child == nullptr; }
  bool certified() const;
};

struct SchedulePlan {
  RegimeParams params;
  PlanMode mode = PlanMode::kIntegerExact;
  int q = 2;
  // levels.front() is the base node, levels.back() the root.
  std::vector<std::shared_ptr<const ScheduleNode>> levels;
  // Requested size and its time; equal to the root's in integer-exact mode,
  // log-log interpolated between the bracketing levels in continuous mode.
  double target_r = 0.0;
  double target_time = 0.0;
  std::vector<std::string> warnings;

  const ScheduleNode& root() const { return *levels.back(); }
  const ScheduleNode& base() const { return *levels.front(); }
  int depth() const { return static_cast<int>(levels.size()) - 1; }
  std::vector<std::int64_t> merge_factors() const;
  bool certified() const;
};

RegimeParams make_regime_params(double alpha, int d, const PlanOptions& options);

// Builds the recursion up to `target_r`. In integer-exact mode the target must
// equal r0 * prod(m_i); otherwise kUnreachableSize names the bracketing sizes.
SchedulePlan plan(double alpha, int d, double target_r, const PlanOptions& options = {});

// Time to encode a cube of side r in [base r, root r]: exact at level sizes,
// log-log interpolated between consecutive levels.
double time_at(const SchedulePlan& plan, double r);

// Builds exactly `depth` recursion levels above the base.
SchedulePlan plan_levels(double alpha, int d, int depth, const PlanOptions& options = {});

// Scalings summarized in the comparison table of known bounds and protocols,
// evaluated at (alpha, d, r) with unit prefactors. Entries that do not apply
// at this (alpha, d) are empty.
struct ComparisonCurves {
  std::optional<double> encode_light_cone;
  std::optional<double> encode_prev_best;
  std::optional<double> encode_protocol;
  std::optional<double> known_ghz_light_cone;
  std::optional<double> known_ghz_prev_best;
  std::optional<double> known_ghz_protocol;
  std::optional<double> transfer_light_cone;
  std::optional<double> transfer_prev_best;
  std::optional<double> transfer_protocol;
  std::optional<double> universal_light_cone;
  std::optional<double> universal_prev_best;
  std::optional<double> universal_protocol;  // never applicable

  std::vector<std::pair<std::string, std::optional<double>>> entries() const;
};

// Requires alpha in the open interval (d, 2d+1).
ComparisonCurves comparison_curves(double alpha, int d, double r);

// Evolution time beyond which simulating n sites needs Omega(n) gates, with
// unit constants: log^{kappa} n, e^{gamma sqrt(log(n)/d)}, n^{alpha/d - 2}.
double t_star(double alpha, int d, double n);

// Leading-order Trotter gate counts (o(1) exponents dropped):
// n^2 t for d < alpha <= 2d, (n t)^{1 + d/(alpha-d)} for alpha > 2d.
double gate_count_upper(double alpha, int d, double n, double t);

// gate_count_upper specialized at t = t_star: n^2 or n^{alpha/d}.
double gate_count_at_t_star(double alpha, int d, double n);

}  // namespace lrghz
