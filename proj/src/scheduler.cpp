#include "lrghz/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lrghz/error.hpp"

namespace lrghz {

namespace {

constexpr double kPi = std::numbers::pi;
// Largest integer cube side the integer-exact mode will represent.
constexpr double kMaxExactSide = 9007199254740992.0;  // 2^53

bool is_stretched(double alpha, int d) { return std::abs(alpha - 2.0 * d) <= kAlphaEqualityTol; }

std::string describe(double alpha, int d) {
  std::ostringstream os;
  os << "alpha=" << alpha << ", d=" << d;
  return os.str();
}

double log_pow(double r, double exponent) {
  if (r <= 1.0) return 0.0;
  return std::pow(std::log(r), exponent);
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int k = 0; k < exp; ++k) out *= base;
  return out;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kPolylog: return "polylog";
    case Regime::kStretchedExp: return "stretched_exp";
    case Regime::kPower: return "power";
  }
  return "unknown";
}

std::string_view to_string(PlanMode mode) {
  return mode == PlanMode::kIntegerExact ? "integer_exact" : "continuous_analytic";
}

Regime classify_regime(double alpha, int d) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!std::isfinite(alpha) || alpha <= d || alpha > 2.0 * d + 1.0) {
    throw Error(ErrorCode::kUnsupportedRegime,
                "alpha must lie in (d, 2d+1]; got " + describe(alpha, d));
  }
  if (is_stretched(alpha, d)) return Regime::kStretchedExp;
  return alpha < 2.0 * d ? Regime::kPolylog : Regime::kPower;
}

bool MergeInterval::contains(double m) const {
  const bool above = lower_open ? m > lower : m >= lower;
  const bool below = upper_open ? m < upper : m <= upper;
  return above && below;
}

MergeInterval merge_interval(double alpha, int d, double r1) {
  switch (classify_regime(alpha, d)) {
    case Regime::kPolylog: {
      const double x = std::pow(r1, 2.0 * d / alpha - 1.0);
      return {x, 2.0 * x, true, false};
    }
    case Regime::kStretchedExp: {
      const double gamma = 3.0 * std::sqrt(static_cast<double>(d));
      const double x = std::exp(gamma / (2.0 * d) * std::sqrt(std::log(r1)));
      return {x, 2.0 * x, false, false};
    }
    case Regime::kPower:
      return {std::pow(3.0, 1.0 / (alpha - 2.0 * d)), std::numeric_limits<double>::infinity(),
              true, true};
  }
  return {};
}

std::int64_t min_stretched_r1(int d) {
  return static_cast<std::int64_t>(std::ceil(std::exp(8.0 / d)));
}

std::int64_t default_constant_m(double alpha, int d) {
  if (classify_regime(alpha, d) != Regime::kPower) {
    throw Error(ErrorCode::kUnsupportedRegime,
                "constant merge factor only exists for 2d < alpha <= 2d+1");
  }
  const double excess = alpha - 2.0 * d;
  auto m = static_cast<std::int64_t>(std::floor(std::pow(3.0, 1.0 / excess))) + 1;
  // Round-off can put floor() exactly on the pole.
  while (std::pow(static_cast<double>(m), excess) <= 3.0 * (1.0 + 1e-12)) ++m;
  return m;
}

std::int64_t choose_m(double alpha, int d, std::int64_t r1) {
  if (r1 < 1) throw Error(ErrorCode::kInvalidArgument, "child side must be >= 1");
  const Regime regime = classify_regime(alpha, d);
  if (regime == Regime::kPower) return default_constant_m(alpha, d);
  if (regime == Regime::kStretchedExp && r1 < min_stretched_r1(d)) {
    throw Error(ErrorCode::kPrecondition,
                "alpha = 2d requires r1 >= exp(8/d) = " + std::to_string(min_stretched_r1(d)) +
                    "; got r1=" + std::to_string(r1));
  }
  const MergeInterval interval = merge_interval(alpha, d, static_cast<double>(r1));
  auto m = regime == Regime::kPolylog
               ? static_cast<std::int64_t>(std::floor(interval.lower)) + 1
               : static_cast<std::int64_t>(std::ceil(interval.lower));
  if (!interval.contains(static_cast<double>(m))) {
    throw Error(ErrorCode::kPrecondition, "no integer merge factor in the admissible interval");
  }
  return m;
}

double choose_m_continuous(double alpha, int d, double r1) {
  if (!(r1 >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "child side must be >= 1");
  const Regime regime = classify_regime(alpha, d);
  if (regime == Regime::kPower) return static_cast<double>(default_constant_m(alpha, d));
  return merge_interval(alpha, d, r1).upper;
}

double step2_time(double alpha, int d, double m, double r1) {
  // pi d^{alpha/2} m^alpha r1^{alpha-2d}, evaluated in log space so huge
  // continuous-mode cubes do not overflow (m r1)^alpha.
  return kPi * std::exp(0.5 * alpha * std::log(static_cast<double>(d)) + alpha * std::log(m) +
                        (alpha - 2.0 * d) * std::log(r1));
}

double merge_phase_time(double alpha, int d, double m, double r1, int q) {
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "levels per site must be >= 2");
  return step2_time(alpha, d, m, r1) * 2.0 / q;
}

double kappa_alpha(double alpha, int d, double kappa_log_base) {
  return std::log(kappa_log_base) / std::log(2.0 * d / alpha);
}

double k_alpha_min(double alpha, int d, double m, double r0, double kappa_log_base) {
  const double dpow = std::pow(d, alpha / 2.0);
  switch (classify_regime(alpha, d)) {
    case Regime::kPower: {
      const double denom = std::pow(m, alpha - 2.0 * d) - 3.0;
      if (denom <= 0.0) {
        throw Error(ErrorCode::kPole, "K_alpha undefined: m^{alpha-2d} <= 3 for m=" +
                                          std::to_string(m) + ", " + describe(alpha, d));
      }
      return kPi * dpow * std::pow(m, alpha) / denom;
    }
    case Regime::kStretchedExp:
      return std::pow(2.0, alpha) * kPi * dpow / (std::exp(2.0) - 3.0);
    case Regime::kPolylog: {
      if (!(kappa_log_base > 3.0 && kappa_log_base <= 4.0)) {
        throw Error(ErrorCode::kInvalidArgument, "kappa log base must lie in (3, 4]");
      }
      if (!(r0 > 1.0)) throw Error(ErrorCode::kInvalidArgument, "polylog regime needs r0 >= 2");
      const double merge_cap = kPi * std::pow(2.0 * std::sqrt(static_cast<double>(d)), alpha);
      return merge_cap /
             ((kappa_log_base - 3.0) * log_pow(r0, kappa_alpha(alpha, d, kappa_log_base)));
    }
  }
  return 0.0;
}

double bound_kernel(const RegimeParams& params, double r) {
  switch (params.regime) {
    case Regime::kPolylog: return log_pow(r, params.kappa_alpha);
    case Regime::kStretchedExp: return std::exp(params.gamma * std::sqrt(std::max(0.0, std::log(r))));
    case Regime::kPower: return std::pow(r, params.alpha - 2.0 * params.d);
  }
  return 0.0;
}

double bound_t(double alpha, int d, double r, const RegimeParams& params) {
  if (classify_regime(alpha, d) != params.regime || params.d != d) {
    throw Error(ErrorCode::kInvalidArgument, "regime parameters do not match " + describe(alpha, d));
  }
  return params.K_alpha * bound_kernel(params, r);
}

RegimeParams make_regime_params(double alpha, int d, const PlanOptions& options) {
  RegimeParams p;
  p.alpha = alpha;
  p.d = d;
  p.regime = classify_regime(alpha, d);
  p.gamma = 3.0 * std::sqrt(static_cast<double>(d));
  p.lambda = 2.0 * d / alpha;
  p.kappa_log_base = options.kappa_log_base;
  if (p.regime == Regime::kPolylog) p.kappa_alpha = kappa_alpha(alpha, d, options.kappa_log_base);
  if (options.r0 > 0) {
    p.r0 = options.r0;
  } else {
    p.r0 = p.regime == Regime::kStretchedExp ? min_stretched_r1(d) : 2;
  }
  if (p.regime == Regime::kPower) {
    p.constant_m = options.constant_m.value_or(default_constant_m(alpha, d));
    if (p.constant_m < 2) throw Error(ErrorCode::kInvalidArgument, "constant m must be > 1");
  }
  p.K_alpha = options.K_alpha.has_value()
                  ? *options.K_alpha
                  : k_alpha_min(alpha, d, static_cast<double>(p.constant_m),
                                static_cast<double>(p.r0), options.kappa_log_base);
  p.t_base = options.t_base.value_or(p.K_alpha * bound_kernel(p, static_cast<double>(p.r0)));
  return p;
}

bool ScheduleNode::certified() const { return t_total <= bound * (1.0 + 1e-9); }

std::vector<std::int64_t> SchedulePlan::merge_factors() const {
  std::vector<std::int64_t> out;
  for (std::size_t k = 1; k < levels.size(); ++k) out.push_back(std::llround(levels[k]->m));
  return out;
}

bool SchedulePlan::certified() const {
  for (const auto& node : levels) {
    if (!node->certified()) return false;
  }
  return true;
}

namespace {

class PlanBuilder {
 public:
  PlanBuilder(double alpha, int d, const PlanOptions& options) : options_(options) {
    if (options.q < 2) throw Error(ErrorCode::kInvalidArgument, "levels per site must be >= 2");
    plan_.params = make_regime_params(alpha, d, options);
    plan_.mode = options.mode;
    plan_.q = options.q;
    const RegimeParams& p = plan_.params;
    if (p.r0 < 1) throw Error(ErrorCode::kInvalidArgument, "base side r0 must be >= 1");

    auto base = std::make_shared<ScheduleNode>();
    base->r = static_cast<double>(p.r0);
    base->t_total = p.t_base;
    base->bound = p.K_alpha * bound_kernel(p, base->r);
    plan_.levels.push_back(base);

    if (p.regime == Regime::kPolylog) {
      const double cap = kPi * std::pow(2.0 * std::sqrt(static_cast<double>(d)), alpha);
      if (p.K_alpha * (p.kappa_log_base - 3.0) * bound_kernel(p, base->r) < cap * (1.0 - 1e-12)) {
        plan_.warnings.push_back(
            "K_alpha log^kappa(r0) is below pi (2 sqrt d)^alpha / (b - 3); the time "
            "certificate is not guaranteed");
      }
    }
    if (p.regime == Regime::kStretchedExp && p.r0 < min_stretched_r1(d)) {
      plan_.warnings.push_back("r0 below exp(8/d); the alpha = 2d certificate is not guaranteed");
    }
    if (!options.forced_m.empty()) {
      plan_.warnings.push_back("merge factors forced; certificate reported separately");
    }
  }

  double current_r() const { return plan_.levels.back()->r; }

  void grow() {
    const RegimeParams& p = plan_.params;
    const std::size_t level = plan_.levels.size() - 1;
    const double r1 = current_r();
    double m = 0.0;
    bool forced = false;
    if (level < options_.forced_m.size()) {
      m = static_cast<double>(options_.forced_m[level]);
      forced = true;
      if (m < 2.0) throw Error(ErrorCode::kInvalidArgument, "forced merge factor must be >= 2");
    } else if (plan_.mode == PlanMode::kContinuous) {
      m = p.regime == Regime::kPower ? static_cast<double>(p.constant_m)
                                     : choose_m_continuous(p.alpha, p.d, r1);
    } else {
      m = p.regime == Regime::kPower
              ? static_cast<double>(p.constant_m)
              : static_cast<double>(choose_m(p.alpha, p.d, static_cast<std::int64_t>(r1)));
    }

    auto node = std::make_shared<ScheduleNode>();
    node->r1 = r1;
    node->m = m;
    node->r = m * r1;
    if (plan_.mode == PlanMode::kIntegerExact && node->r > kMaxExactSide) {
      throw Error(ErrorCode::kUnreachableSize, "cube side exceeds 2^53 in integer-exact mode");
    }
    if (!std::isfinite(node->r)) {
      throw Error(ErrorCode::kUnreachableSize, "cube side overflowed");
    }
    node->t1 = plan_.levels.back()->t_total;
    node->t2 = merge_phase_time(p.alpha, p.d, m, r1, plan_.q);
    node->t_total = 3.0 * node->t1 + node->t2;
    node->bound = p.K_alpha * bound_kernel(p, node->r);
    node->forced = forced;
    if (plan_.mode == PlanMode::kIntegerExact) node->child_count = ipow(std::llround(m), p.d);
    node->child = plan_.levels.back();
    plan_.levels.push_back(std::move(node));
  }

  SchedulePlan finish(double target_r, double target_time) {
    plan_.target_r = target_r;
    plan_.target_time = target_time;
    return std::move(plan_);
  }

  const SchedulePlan& current() const { return plan_; }

 private:
  PlanOptions options_;
  SchedulePlan plan_;
};

constexpr int kMaxLevels = 100000;

}  // namespace

SchedulePlan plan(double alpha, int d, double target_r, const PlanOptions& options) {
  PlanBuilder builder(alpha, d, options);
  const double r0 = builder.current_r();
  if (!(target_r >= r0)) {
    throw Error(ErrorCode::kUnreachableSize,
                "target side is below the base side r0=" + std::to_string(std::llround(r0)));
  }
  if (options.mode == PlanMode::kIntegerExact) {
    if (target_r != std::floor(target_r) || target_r > kMaxExactSide) {
      throw Error(ErrorCode::kUnreachableSize, "integer-exact mode needs an integer target side");
    }
    while (builder.current_r() < target_r) builder.grow();
    if (builder.current_r() != target_r) {
      const auto& levels = builder.current().levels;
      const double below = levels[levels.size() - 2]->r;
      std::ostringstream os;
      os << "target side " << static_cast<std::int64_t>(target_r)
         << " is not reachable; nearest reachable sizes are " << static_cast<std::int64_t>(below)
         << " and " << static_cast<std::int64_t>(builder.current_r());
      throw Error(ErrorCode::kUnreachableSize, os.str());
    }
    const double t = builder.current().root().t_total;
    return builder.finish(target_r, t);
  }

  int guard = 0;
  while (builder.current_r() < target_r) {
    if (++guard > kMaxLevels) throw Error(ErrorCode::kUnreachableSize, "recursion did not reach target");
    builder.grow();
  }
  const double t = time_at(builder.current(), target_r);
  return builder.finish(target_r, t);
}

double time_at(const SchedulePlan& plan, double r) {
  const auto& levels = plan.levels;
  if (!(r >= levels.front()->r) || r > levels.back()->r) {
    throw Error(ErrorCode::kUnreachableSize, "side outside the plan's range");
  }
  auto hi = std::lower_bound(levels.begin(), levels.end(), r,
                             [](const auto& node, double value) { return node->r < value; });
  if ((*hi)->r == r || hi == levels.begin()) return (*hi)->t_total;
  const ScheduleNode& upper = **hi;
  const ScheduleNode& lower = **(hi - 1);
  const double w = std::log(r / lower.r) / std::log(upper.r / lower.r);
  return std::exp(std::log(lower.t_total) + w * std::log(upper.t_total / lower.t_total));
}

SchedulePlan plan_levels(double alpha, int d, int depth, const PlanOptions& options) {
  if (depth < 0) throw Error(ErrorCode::kInvalidArgument, "depth must be >= 0");
  PlanBuilder builder(alpha, d, options);
  for (int k = 0; k < depth; ++k) builder.grow();
  const double r = builder.current_r();
  const double t = builder.current().root().t_total;
  return builder.finish(r, t);
}

std::vector<std::pair<std::string, std::optional<double>>> ComparisonCurves::entries() const {
  return {
      {"encode_light_cone", encode_light_cone},
      {"encode_prev_best", encode_prev_best},
      {"encode_protocol", encode_protocol},
      {"known_ghz_light_cone", known_ghz_light_cone},
      {"known_ghz_prev_best", known_ghz_prev_best},
      {"known_ghz_protocol", known_ghz_protocol},
      {"transfer_light_cone", transfer_light_cone},
      {"transfer_prev_best", transfer_prev_best},
      {"transfer_protocol", transfer_protocol},
      {"universal_light_cone", universal_light_cone},
      {"universal_prev_best", universal_prev_best},
      {"universal_protocol", universal_protocol},
  };
}

ComparisonCurves comparison_curves(double alpha, int d, double r) {
  if (!(alpha < 2.0 * d + 1.0)) {
    throw Error(ErrorCode::kUnsupportedRegime,
                "table only covers d < alpha < 2d+1; got " + describe(alpha, d));
  }
  const Regime regime = classify_regime(alpha, d);
  if (!(r >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "r must be >= 1");
  const double dd = d;
  const double logr = std::log(r);
  const bool upto_2d = regime != Regime::kPower;

  ComparisonCurves c;
  if (upto_2d) {
    c.encode_light_cone = logr;
  } else if (d == 1) {
    c.encode_light_cone = std::pow(r, alpha - 2.0);
  } else {
    c.encode_light_cone = std::pow(r, (alpha - 2.0 * dd) / (alpha - dd));
  }
  c.encode_prev_best = alpha < dd + 1.0 ? std::pow(r, alpha - dd) : r;

  RegimeParams unit;
  unit.alpha = alpha;
  unit.d = d;
  unit.regime = regime;
  unit.gamma = 3.0 * std::sqrt(dd);
  unit.kappa_alpha = regime == Regime::kPolylog ? kappa_alpha(alpha, d) : 0.0;
  c.encode_protocol = bound_kernel(unit, r);

  c.known_ghz_light_cone =
      upto_2d ? logr : std::pow(r, (alpha - 2.0 * dd) / (alpha - dd + 1.0));
  c.known_ghz_prev_best = c.encode_prev_best;
  c.known_ghz_protocol = c.encode_protocol;

  c.transfer_light_cone = c.encode_light_cone;
  c.transfer_prev_best = alpha < dd + 1.0 ? std::pow(r, alpha * (alpha - dd) / (alpha + dd))
                                          : std::pow(r, alpha / (2.0 * dd + 1.0));
  c.transfer_protocol = c.encode_protocol;

  // Where a one-dimensional entry exists it is the strongest applicable cone.
  if (upto_2d) {
    c.universal_light_cone = std::pow(r, (2.0 * alpha - 2.0 * dd) / (2.0 * alpha - dd + 1.0));
  } else if (d == 1) {
    c.universal_light_cone = alpha <= 2.5 ? std::pow(r, alpha - 1.5) : r;
  } else {
    c.universal_light_cone = std::pow(r, (alpha - 2.0 * dd) / (alpha - dd));
  }
  c.universal_prev_best = r;
  return c;
}

double t_star(double alpha, int d, double n) {
  if (!(n >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  switch (classify_regime(alpha, d)) {
    case Regime::kPolylog: return log_pow(n, kappa_alpha(alpha, d));
    case Regime::kStretchedExp:
      return std::exp(3.0 * std::sqrt(static_cast<double>(d)) * std::sqrt(std::log(n) / d));
    case Regime::kPower: return std::pow(n, alpha / d - 2.0);
  }
  return 0.0;
}

double gate_count_upper(double alpha, int d, double n, double t) {
  if (d < 1 || !(alpha > d)) {
    throw Error(ErrorCode::kUnsupportedRegime, "gate-count bounds need alpha > d; got " + describe(alpha, d));
  }
  if (!(n >= 1.0) || !(t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "need n >= 1 and t >= 0");
  if (alpha <= 2.0 * d + kAlphaEqualityTol) return n * n * t;
  return std::pow(n * t, 1.0 + d / (alpha - d));
}

double gate_count_at_t_star(double alpha, int d, double n) {
  const Regime regime = classify_regime(alpha, d);
  if (!(n >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  return regime == Regime::kPower ? std::pow(n, alpha / d) : n * n;
}

}  // namespace lrghz
