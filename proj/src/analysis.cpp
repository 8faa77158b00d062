#include "lrghz/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "lrghz/error.hpp"

namespace lrghz {

namespace {

// Upper end of the evidence windows; continuous chains stay finite up to here
// for every supported alpha.
constexpr int kMaxDecade = 150;

PlanOptions continuous(PlanOptions opts) {
  opts.mode = PlanMode::kContinuous;
  opts.forced_m.clear();
  return opts;
}

double prev_best_exponent(double alpha, int d) {
  return alpha < d + 1.0 ? alpha - d : 1.0;
}

}  // namespace

std::string_view to_string(SpeedupClass c) {
  return c == SpeedupClass::kPolynomial ? "polynomial" : "superpolynomial";
}

std::vector<ScalingRow> scaling_sweep(const std::vector<double>& alphas, int d,
                                      const std::vector<double>& r_values, PlanMode preferred,
                                      const PlanOptions& base) {
  std::vector<ScalingRow> rows;
  for (double alpha : alphas) {
    const Regime regime = classify_regime(alpha, d);
    std::optional<SchedulePlan> curve;
    for (double r : r_values) {
      ScalingRow row;
      row.alpha = alpha;
      row.d = d;
      row.r = r;
      row.regime = regime;
      std::optional<SchedulePlan> exact;
      if (preferred == PlanMode::kIntegerExact) {
        PlanOptions opts = base;
        opts.mode = PlanMode::kIntegerExact;
        try {
          exact = plan(alpha, d, r, opts);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kUnreachableSize && e.code() != ErrorCode::kPrecondition) throw;
        }
      }
      if (exact) {
        row.mode = PlanMode::kIntegerExact;
        row.t_protocol = exact->target_time;
        row.t_bound = exact->params.K_alpha * bound_kernel(exact->params, r);
      } else {
        if (!curve || curve->root().r < r) curve = plan(alpha, d, r, continuous(base));
        row.mode = PlanMode::kContinuous;
        row.t_protocol = time_at(*curve, r);
        row.t_bound = curve->params.K_alpha * bound_kernel(curve->params, r);
      }
      row.certified = row.t_protocol <= row.t_bound * (1.0 + 1e-9);
      if (alpha < 2.0 * d + 1.0) {
        const ComparisonCurves table = comparison_curves(alpha, d, r);
        row.t_prev_best = table.encode_prev_best;
        row.t_lightcone = table.encode_light_cone;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kInvalidArgument, "slope fit needs distinct x values");
  return sxy / sxx;
}

double tail_exponent(const std::vector<ScalingRow>& rows, double window_decades) {
  double r_max = 0.0;
  for (const auto& row : rows) r_max = std::max(r_max, row.r);
  const double r_min = r_max / std::pow(10.0, window_decades);
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : rows) {
    if (row.r >= r_min && row.t_protocol > 0.0) {
      x.push_back(std::log(row.r));
      y.push_back(std::log(row.t_protocol));
    }
  }
  return fit_slope(x, y);
}

Curve protocol_curve(double alpha, int d, double r_lo, double r_hi, int samples, const PlanOptions& base) {
  if (samples < 2 || !(r_hi > r_lo)) throw Error(ErrorCode::kInvalidArgument, "need r_lo < r_hi and >= 2 samples");
  const SchedulePlan chain = plan(alpha, d, r_hi, continuous(base));
  Curve c;
  const double lo = std::log(r_lo);
  const double hi = std::log(r_hi);
  for (int k = 0; k < samples; ++k) {
    const double r = k + 1 == samples ? r_hi : std::exp(lo + (hi - lo) * k / (samples - 1));
    c.r.push_back(r);
    c.t.push_back(time_at(chain, r));
  }
  return c;
}

std::vector<double> decade_exponents(double alpha, int d, int first_decade, int last_decade,
                                     int samples_per_decade, const PlanOptions& base) {
  if (last_decade <= first_decade || last_decade > kMaxDecade + 50) {
    throw Error(ErrorCode::kInvalidArgument, "bad decade range");
  }
  const SchedulePlan chain = plan(alpha, d, std::pow(10.0, last_decade), continuous(base));
  std::vector<double> out;
  for (int k = first_decade; k < last_decade; ++k) {
    std::vector<double> x;
    std::vector<double> y;
    for (int s = 0; s <= samples_per_decade; ++s) {
      const double lr = (k + static_cast<double>(s) / samples_per_decade) * std::log(10.0);
      const double r = std::min(std::exp(lr), chain.root().r);
      if (r < chain.base().r) continue;
      x.push_back(std::log(r));
      y.push_back(std::log(time_at(chain, r)));
    }
    out.push_back(fit_slope(x, y));
  }
  return out;
}

double sqrt_log_slope(double alpha, int d, double r_lo, double r_hi, int samples, const PlanOptions& base) {
  const Curve c = protocol_curve(alpha, d, r_lo, r_hi, samples, base);
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < c.r.size(); ++i) {
    x.push_back(std::sqrt(std::log(c.r[i])));
    y.push_back(std::log(c.t[i]));
  }
  return fit_slope(x, y);
}

SpeedupReport speedup_report(double alpha, int d, double r, const PlanOptions& base) {
  if (!(alpha < 2.0 * d + 1.0)) {
    throw Error(ErrorCode::kUnsupportedRegime, "speedup comparison needs d < alpha < 2d+1");
  }
  classify_regime(alpha, d);
  if (!(r >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "r must be >= 1");

  SpeedupReport rep;
  rep.alpha = alpha;
  rep.d = d;
  rep.r = r;
  rep.prev_exponent = prev_best_exponent(alpha, d);

  const SchedulePlan chain = plan(alpha, d, std::pow(10.0, kMaxDecade), continuous(base));
  auto t_proto = [&](double x) { return x <= chain.base().r ? chain.base().t_total : time_at(chain, x); };
  auto t_prev = [&](double x) { return std::pow(x, rep.prev_exponent); };

  if (r == 1.0) {
    rep.ratio = 1.0;
  } else {
    if (r > chain.root().r) throw Error(ErrorCode::kInvalidArgument, "r beyond the analysed range");
    rep.t_protocol = t_proto(r);
    rep.t_prev_best = t_prev(r);
    rep.ratio = rep.t_prev_best / rep.t_protocol;
  }

  // Evidence windows of ten decades each, starting one decade above r0.
  const int start = static_cast<int>(std::ceil(std::log10(chain.base().r))) + 1;
  for (int k = start; k + 10 <= kMaxDecade; k += 10) {
    std::vector<double> x;
    std::vector<double> y;
    for (int s = 0; s <= 40; ++s) {
      const double rr = std::pow(10.0, k + s / 4.0);
      x.push_back(std::log(rr));
      y.push_back(std::log(t_proto(rr)));
    }
    rep.window_exponents.push_back(fit_slope(x, y));
    const double end = std::pow(10.0, k + 10);
    rep.window_ratios.push_back(t_prev(end) / t_proto(end));
  }

  const auto& e = rep.window_exponents;
  bool decreasing = e.size() >= 2;
  for (std::size_t i = 1; i < e.size(); ++i) decreasing = decreasing && e[i] <= e[i - 1] + 1e-9;
  bool ratio_growing = rep.window_ratios.size() >= 2;
  for (std::size_t i = 1; i < rep.window_ratios.size(); ++i) {
    ratio_growing = ratio_growing && rep.window_ratios[i] > rep.window_ratios[i - 1];
  }
  if (decreasing && ratio_growing && e.back() < 0.5 * e.front()) {
    rep.classification = SpeedupClass::kSuperpolynomial;
  } else {
    rep.classification = SpeedupClass::kPolynomial;
  }
  rep.speedup_exponent = rep.prev_exponent - (e.empty() ? 0.0 : e.back());

  // Crossover on a quarter-decade grid from r0.
  std::optional<double> crossover;
  for (double lr = std::log10(chain.base().r); lr <= kMaxDecade; lr += 0.25) {
    const double rr = std::pow(10.0, lr);
    if (t_prev(rr) / t_proto(rr) >= 1.0) {
      if (!crossover) crossover = rr;
    } else {
      crossover.reset();
    }
  }
  rep.crossover_r = crossover;
  return rep;
}

std::vector<GateBoundRow> gate_bound_table(double alpha, int d, const std::vector<double>& n_values) {
  std::vector<GateBoundRow> rows;
  for (double n : n_values) {
    GateBoundRow row;
    row.n = n;
    row.t_star = t_star(alpha, d, n);
    row.lower = n;
    row.upper = gate_count_at_t_star(alpha, d, n);
    row.gap = row.upper / row.lower;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lrghz
