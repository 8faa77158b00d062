#include "lrghz/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lrghz/error.hpp"

namespace lrghz {

namespace {

std::size_t pow_q(int q, std::size_t site) {
  std::size_t s = 1;
  for (std::size_t k = 0; k < site; ++k) s *= static_cast<std::size_t>(q);
  return s;
}

// Every offset sum_s digit_s q^s over the configurations of `sites`.
std::vector<std::size_t> enumerate_offsets(const std::vector<std::size_t>& sites, int q) {
  std::vector<std::size_t> out{0};
  for (std::size_t s : sites) {
    const std::size_t stride = pow_q(q, s);
    const std::size_t before = out.size();
    out.reserve(before * static_cast<std::size_t>(q));
    for (int level = 1; level < q; ++level) {
      for (std::size_t k = 0; k < before; ++k) out.push_back(out[k] + static_cast<std::size_t>(level) * stride);
    }
  }
  return out;
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& sorted_sites, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (!std::binary_search(sorted_sites.begin(), sorted_sites.end(), s)) out.push_back(s);
  }
  return out;
}

std::size_t unit_offset(const std::vector<std::size_t>& sites, int q) {
  std::size_t u = 0;
  for (std::size_t s : sites) u += pow_q(q, s);
  return u;
}

// e^{-2 pi i k / q}
std::complex<double> root_of_unity_conj(long long k, int q) {
  return std::conj(root_of_unity<double>(k, q));
}

void validate_request(const StateVector& state, const EncodeRequest& request) {
  request.lattice.validate();
  if (!request.plan) throw Error(ErrorCode::kPlanMismatch, "no schedule plan given");
  const SchedulePlan& plan = *request.plan;
  if (plan.mode != PlanMode::kIntegerExact) {
    throw Error(ErrorCode::kPlanMismatch, "simulation needs an integer-exact plan");
  }
  if (plan.params.d != request.lattice.d) throw Error(ErrorCode::kPlanMismatch, "plan dimension differs from lattice");
  if (plan.q != request.lattice.q) throw Error(ErrorCode::kPlanMismatch, "plan q differs from lattice q");
  if (plan.root().r != static_cast<double>(request.region.side)) {
    throw Error(ErrorCode::kPlanMismatch, "plan root side " + std::to_string(std::llround(plan.root().r)) +
                                              " differs from region side " + std::to_string(request.region.side));
  }
  site_mask(request.region, request.lattice);
  if (!request.region.contains(request.info_site)) {
    throw Error(ErrorCode::kOutOfBounds, "information site is not inside the region");
  }
  if (state.q != request.lattice.q || static_cast<std::size_t>(state.n) != request.lattice.site_count()) {
    throw Error(ErrorCode::kShapeMismatch, "state does not match the lattice");
  }
}

class Runner {
 public:
  Runner(StateVector& state, const EncodeRequest& request, const ProtocolOptions& options,
         ProtocolTrace& trace, const StepVerifier* verifier, double clock_offset)
      : state_(state),
        request_(request),
        options_(options),
        trace_(trace),
        verifier_(verifier),
        clock_offset_(clock_offset) {
    const int q = request.lattice.q;
    rotate_ = (q == 2 && !options.qubit_dft) ? hadamard<double>() : dft<double>(q);
  }

  void run(const ScheduleNode& node, int level, const Region& region, const Coord& c, bool forward,
           int depth, double start) {
    if (node.is_base()) {
      run_base(region, c, forward, depth, start, level);
      return;
    }
    const int m = static_cast<int>(std::llround(node.m));
    const auto subs = partition(region, m, c);
    std::vector<Coord> designated;
    for (std::size_t j = 0; j < subs.size(); ++j) designated.push_back(j == 0 ? c : subs[j].anchor);
    const std::vector<Region> targets(subs.begin() + 1, subs.end());
    const ScheduleNode& child = *node.child;
    const double t1 = node.t1;
    const double t2 = node.t2;

    auto children = [&](bool include_first, bool fwd, double at) {
      for (std::size_t j = include_first ? 0 : 1; j < subs.size(); ++j) {
        run(child, level - 1, subs[j], designated[j], fwd, depth + 1, at);
      }
    };
    auto rotate_targets = [&](bool fwd) {
      for (std::size_t j = 1; j < subs.size(); ++j) {
        Gate g{fwd ? rotate_ : CMatrix<double>(rotate_.adjoint()), flat(designated[j])};
        apply_gate(state_, g);
      }
    };

    if (forward) {
      rotate_targets(true);
      children(true, true, start);
      record(level, depth, StepKind::kEncodeChildren, false, subs, start, t1);
      merge(node, subs, true, level, depth, start + t1);
      children(false, false, start + t1 + t2);
      record(level, depth, StepKind::kConcentrate, false, targets, start + t1 + t2, t1);
      rotate_targets(true);
      record(level, depth, StepKind::kRotate, false, targets, start + 2 * t1 + t2, 0.0);
      children(false, true, start + 2 * t1 + t2);
      record(level, depth, StepKind::kSpread, false, targets, start + 2 * t1 + t2, t1);
    } else {
      children(false, false, start);
      record(level, depth, StepKind::kSpread, true, targets, start, t1);
      rotate_targets(false);
      record(level, depth, StepKind::kRotate, true, targets, start + t1, 0.0);
      children(false, true, start + t1);
      record(level, depth, StepKind::kConcentrate, true, targets, start + t1, t1);
      merge(node, subs, false, level, depth, start + 2 * t1);
      children(true, false, start + 2 * t1 + t2);
      rotate_targets(false);
      record(level, depth, StepKind::kEncodeChildren, true, subs, start + 2 * t1 + t2, t1);
    }
  }

 private:
  std::size_t flat(const Coord& c) const { return request_.lattice.flat_index(c); }

  void run_base(const Region& region, const Coord& c, bool forward, int depth, double start, int level) {
    const std::size_t control = flat(c);
    auto sites = site_mask(region, request_.lattice);
    const int q = request_.lattice.q;
    if (!forward) std::reverse(sites.begin(), sites.end());
    for (std::size_t s : sites) {
      if (s == control) continue;
      apply_controlled_increment(state_, control, s, forward ? 1 : q - 1);
    }
    if (depth == 0) {
      record(level, depth, StepKind::kBase, !forward, {region}, start,
             request_.plan->base().t_total);
    }
  }

  void merge(const ScheduleNode& node, const std::vector<Region>& subs, bool forward, int level,
             int depth, double start) {
    const LatticeSpec& lattice = request_.lattice;
    const SchedulePlan& plan = *request_.plan;
    PhaseCoupling coupling;
    coupling.control = site_mask(subs[0], lattice);
    for (std::size_t j = 1; j < subs.size(); ++j) coupling.targets.push_back(site_mask(subs[j], lattice));
    coupling.strength = std::pow(node.m * node.r1 * std::sqrt(static_cast<double>(lattice.d)),
                                 -plan.params.alpha);

    const double duration = node.t2 * options_.merge_time_scale;
    std::optional<double> deviation;
    if (options_.check_merge_phase) {
      const CVector<double> before = state_.amps;
      evolve_phase(state_, coupling, forward ? duration : -duration);
      deviation = merge_deviation(before, coupling, subs, forward);
    } else {
      evolve_phase(state_, coupling, forward ? duration : -duration);
    }
    const bool keep = depth == 0 || options_.record_nested;
    if (keep) {
      StepRecord rec = make_record(level, depth, StepKind::kMerge, !forward, subs, start, node.t2);
      rec.merge_deviation = deviation;
      attach_fidelity(rec);
      trace_.steps.push_back(std::move(rec));
    } else if (deviation) {
      // Still surface the worst deviation through an unrecorded nested merge.
      worst_unrecorded_ = std::max(worst_unrecorded_, *deviation);
    }
  }

  // Largest |after - ideal * before| over configurations where every subcube
  // is uniform, for every configuration of the sites outside the region.
  double merge_deviation(const CVector<double>& before, const PhaseCoupling& coupling,
                         const std::vector<Region>& subs, bool forward) const {
    const int q = state_.q;
    std::vector<std::size_t> region_sites = coupling.control;
    std::vector<std::size_t> units{unit_offset(coupling.control, q)};
    for (const auto& mask : coupling.targets) {
      region_sites.insert(region_sites.end(), mask.begin(), mask.end());
      units.push_back(unit_offset(mask, q));
    }
    std::sort(region_sites.begin(), region_sites.end());
    const auto outside = enumerate_offsets(complement_of(region_sites, static_cast<std::size_t>(state_.n)), q);

    double worst = 0.0;
    std::vector<int> levels(subs.size(), 0);
    while (true) {
      std::size_t offset = 0;
      long long target_sum = 0;
      for (std::size_t j = 0; j < levels.size(); ++j) {
        offset += static_cast<std::size_t>(levels[j]) * units[j];
        if (j > 0) target_sum += levels[j];
      }
      const long long exponent = static_cast<long long>(levels[0]) * target_sum;
      const std::complex<double> ideal = root_of_unity_conj(forward ? exponent : -exponent, q);
      for (std::size_t z : outside) {
        const auto i = static_cast<Eigen::Index>(offset + z);
        worst = std::max(worst, std::abs(state_.amps[i] - ideal * before[i]));
      }
      std::size_t k = 0;
      while (k < levels.size() && ++levels[k] == q) levels[k++] = 0;
      if (k == levels.size()) break;
    }
    return worst;
  }

  StepRecord make_record(int level, int depth, StepKind step, bool inverse,
                         const std::vector<Region>& regions, double start, double duration) const {
    StepRecord rec;
    rec.level = level;
    rec.depth = depth;
    rec.step = step;
    rec.inverse = inverse;
    rec.regions = regions;
    rec.start = clock_offset_ + start;
    rec.duration = duration;
    return rec;
  }

  void attach_fidelity(StepRecord& rec) const {
    if (rec.depth != 0 || verifier_ == nullptr || !options_.verify_steps) return;
    if (!rec.inverse) {
      rec.fidelity = verifier_->verify(state_, rec.step);
      return;
    }
    // Undoing step k leaves the state expected after step k-1.
    switch (rec.step) {
      case StepKind::kBase:
      case StepKind::kEncodeChildren:
        rec.fidelity = fidelity(state_, verifier_->concentrated());
        break;
      default:
        rec.fidelity = verifier_->verify(state_, static_cast<StepKind>(static_cast<int>(rec.step) - 1));
    }
  }

  void record(int level, int depth, StepKind step, bool inverse, const std::vector<Region>& regions,
              double start, double duration) {
    if (depth != 0 && !options_.record_nested) return;
    StepRecord rec = make_record(level, depth, step, inverse, regions, start, duration);
    attach_fidelity(rec);
    trace_.steps.push_back(std::move(rec));
  }

  StateVector& state_;
  const EncodeRequest& request_;
  const ProtocolOptions& options_;
  ProtocolTrace& trace_;
  const StepVerifier* verifier_;
  double clock_offset_;
  CMatrix<double> rotate_;

 public:
  double worst_unrecorded_ = 0.0;
};

double region_mass(const StateVector& state, const std::vector<std::size_t>& free_sites,
                   const std::vector<std::size_t>& region_units) {
  const auto offsets = enumerate_offsets(free_sites, state.q);
  double mass = 0.0;
  for (std::size_t u : region_units) {
    for (std::size_t z : offsets) mass += std::norm(state.amps[static_cast<Eigen::Index>(u + z)]);
  }
  return mass;
}

bool any_forced(const SchedulePlan& plan) {
  return std::any_of(plan.levels.begin(), plan.levels.end(), [](const auto& n) { return n->forced; });
}

ProtocolTrace run_protocol(StateVector& state, const EncodeRequest& request,
                           const ProtocolOptions& options, bool forward, double clock_offset) {
  validate_request(state, request);
  const LatticeSpec& lattice = request.lattice;
  const auto region_sites = site_mask(request.region, lattice);
  const std::size_t c = lattice.flat_index(request.info_site);
  const auto outside = complement_of(region_sites, lattice.site_count());

  if (forward) {
    // Everything in the region except c must start in |0>.
    std::vector<std::size_t> free_sites = outside;
    free_sites.push_back(c);
    if (region_mass(state, free_sites, {0}) < 1.0 - 1e-10) {
      throw Error(ErrorCode::kPrecondition, "region sites other than c are not all in |0>");
    }
  } else {
    std::vector<std::size_t> units;
    const std::size_t unit = unit_offset(region_sites, lattice.q);
    for (int l = 0; l < lattice.q; ++l) units.push_back(static_cast<std::size_t>(l) * unit);
    if (region_mass(state, outside, units) < 1.0 - 1e-10) {
      throw Error(ErrorCode::kPrecondition, "region is not in a GHZ-like state");
    }
  }

  const StepVerifier verifier(state, request,
                              forward ? StepVerifier::Input::kConcentrated : StepVerifier::Input::kGhz);
  ProtocolTrace trace;
  trace.forced_m = any_forced(*request.plan);
  trace.total_time = request.plan->root().t_total;
  Runner runner(state, request, options, trace, &verifier, clock_offset);
  runner.run(request.plan->root(), request.plan->depth(), request.region, request.info_site, forward, 0, 0.0);
  if (runner.worst_unrecorded_ > 0.0) {
    // Fold unrecorded nested deviations into the top-level merge record.
    for (auto& rec : trace.steps) {
      if (rec.step == StepKind::kMerge && rec.merge_deviation) {
        rec.merge_deviation = std::max(*rec.merge_deviation, runner.worst_unrecorded_);
        break;
      }
    }
  }
  trace.final_fidelity =
      forward ? verifier.verify(state, StepKind::kSpread) : fidelity(state, verifier.concentrated());
  return trace;
}

}  // namespace

double ProtocolTrace::top_level_time() const {
  double total = 0.0;
  for (const auto& rec : steps) {
    if (rec.depth == 0) total += rec.duration;
  }
  return total;
}

double ProtocolTrace::max_merge_deviation() const {
  double worst = 0.0;
  for (const auto& rec : steps) {
    if (rec.merge_deviation) worst = std::max(worst, *rec.merge_deviation);
  }
  return worst;
}

double ProtocolTrace::min_step_fidelity() const {
  double lowest = 1.0;
  for (const auto& rec : steps) {
    if (rec.fidelity) lowest = std::min(lowest, *rec.fidelity);
  }
  return lowest;
}

ProtocolTrace encode(StateVector& state, const EncodeRequest& request, const ProtocolOptions& options) {
  return run_protocol(state, request, options, true, 0.0);
}

ProtocolTrace decode(StateVector& state, const EncodeRequest& request, const ProtocolOptions& options) {
  return run_protocol(state, request, options, false, 0.0);
}

ProtocolTrace state_transfer(StateVector& state, const LatticeSpec& lattice, const Coord& c,
                             const Coord& c_prime, const Region& region,
                             std::shared_ptr<const SchedulePlan> plan, const ProtocolOptions& options) {
  EncodeRequest at_source{lattice, region, c, plan};
  validate_request(state, at_source);
  if (!region.contains(c_prime)) throw Error(ErrorCode::kOutOfBounds, "destination is not inside the region");
  if (c == c_prime) {
    ProtocolTrace idle;
    idle.final_fidelity = 1.0;
    return idle;
  }
  const StepVerifier source(state, at_source, StepVerifier::Input::kConcentrated);
  const StateVector wanted = source.concentrated_at(lattice.flat_index(c_prime));

  ProtocolTrace trace = run_protocol(state, at_source, options, true, 0.0);
  const double t = trace.total_time;
  EncodeRequest at_dest{lattice, region, c_prime, plan};
  ProtocolTrace back = run_protocol(state, at_dest, options, false, t);
  for (auto& rec : back.steps) trace.steps.push_back(std::move(rec));
  trace.total_time = 2.0 * t;
  trace.final_fidelity = fidelity(state, wanted);
  return trace;
}

StepVerifier::StepVerifier(const StateVector& input, const EncodeRequest& request, Input form)
    : lattice_(request.lattice), q_(request.lattice.q) {
  region_sites_ = site_mask(request.region, lattice_);
  info_site_ = lattice_.flat_index(request.info_site);
  const ScheduleNode& root = request.plan->root();
  if (root.is_base()) {
    sub_sites_.push_back(region_sites_);
    designated_.push_back(info_site_);
  } else {
    const auto subs = partition(request.region, static_cast<int>(std::llround(root.m)), request.info_site);
    for (std::size_t j = 0; j < subs.size(); ++j) {
      sub_sites_.push_back(site_mask(subs[j], lattice_));
      designated_.push_back(j == 0 ? info_site_ : lattice_.flat_index(subs[j].anchor));
    }
  }
  complement_offsets_ = enumerate_offsets(complement_of(region_sites_, lattice_.site_count()), q_);
  const std::size_t unit = form == Input::kConcentrated ? pow_q(q_, info_site_) : unit_offset(region_sites_, q_);
  branches_.assign(static_cast<std::size_t>(q_), {});
  for (int l = 0; l < q_; ++l) {
    auto& branch = branches_[static_cast<std::size_t>(l)];
    branch.reserve(complement_offsets_.size());
    for (std::size_t z : complement_offsets_) {
      branch.push_back(input.amps[static_cast<Eigen::Index>(static_cast<std::size_t>(l) * unit + z)]);
    }
  }
}

StateVector StepVerifier::assemble(const std::vector<std::vector<Term>>& terms) const {
  StateVector out{q_, static_cast<int>(lattice_.site_count()),
                  CVector<double>::Zero(static_cast<Eigen::Index>(pow_q(q_, lattice_.site_count())))};
  for (std::size_t l = 0; l < terms.size(); ++l) {
    for (const Term& t : terms[l]) {
      for (std::size_t k = 0; k < complement_offsets_.size(); ++k) {
        out.amps[static_cast<Eigen::Index>(t.offset + complement_offsets_[k])] += t.amp * branches_[l][k];
      }
    }
  }
  return out;
}

StateVector StepVerifier::expected(StepKind step) const {
  const double amp_each = 1.0 / std::sqrt(static_cast<double>(q_));
  std::vector<std::vector<Term>> terms(static_cast<std::size_t>(q_));
  const std::size_t targets = sub_sites_.size() - 1;
  for (int l = 0; l < q_; ++l) {
    auto& out = terms[static_cast<std::size_t>(l)];
    const std::size_t control = static_cast<std::size_t>(l) * unit_offset(sub_sites_[0], q_);
    switch (step) {
      case StepKind::kBase:
      case StepKind::kSpread:
        out.push_back({static_cast<std::size_t>(l) * unit_offset(region_sites_, q_), 1.0});
        break;
      case StepKind::kRotate: {
        std::size_t offset = control;
        for (std::size_t j = 1; j <= targets; ++j) offset += static_cast<std::size_t>(l) * pow_q(q_, designated_[j]);
        out.push_back({offset, 1.0});
        break;
      }
      case StepKind::kEncodeChildren:
      case StepKind::kMerge:
      case StepKind::kConcentrate: {
        // Sum over the level l' of every target subcube.
        std::vector<int> lp(targets, 0);
        while (true) {
          std::size_t offset = control;
          std::complex<double> amp = 1.0;
          for (std::size_t j = 1; j <= targets; ++j) {
            const auto level = static_cast<std::size_t>(lp[j - 1]);
            offset += step == StepKind::kConcentrate ? level * pow_q(q_, designated_[j])
                                                     : level * unit_offset(sub_sites_[j], q_);
            amp *= amp_each;
            if (step != StepKind::kEncodeChildren) amp *= root_of_unity_conj(static_cast<long long>(l) * lp[j - 1], q_);
          }
          out.push_back({offset, amp});
          std::size_t k = 0;
          while (k < lp.size() && ++lp[k] == q_) lp[k++] = 0;
          if (k == lp.size()) break;
        }
        break;
      }
    }
  }
  return assemble(terms);
}

StateVector StepVerifier::concentrated() const { return concentrated_at(info_site_); }

StateVector StepVerifier::concentrated_at(std::size_t flat_site) const {
  std::vector<std::vector<Term>> terms(static_cast<std::size_t>(q_));
  for (int l = 0; l < q_; ++l) {
    terms[static_cast<std::size_t>(l)].push_back({static_cast<std::size_t>(l) * pow_q(q_, flat_site), 1.0});
  }
  return assemble(terms);
}

double StepVerifier::verify(const StateVector& state, StepKind step) const {
  return fidelity(state, expected(step));
}

double verify_step(const StateVector& state, int step, const StepVerifier& verifier) {
  if (step < 0 || step > 5) throw Error(ErrorCode::kInvalidArgument, "unknown step id " + std::to_string(step));
  return verifier.verify(state, static_cast<StepKind>(step));
}

}  // namespace lrghz
