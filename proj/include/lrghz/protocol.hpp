#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lrghz/geometry.hpp"
#include "lrghz/scheduler.hpp"
#include "lrghz/simulator.hpp"

namespace lrghz {

struct EncodeRequest {
  LatticeSpec lattice;
  Region region;
  Coord info_site;  // c, the site holding (or receiving) the information
  std::shared_ptr<const SchedulePlan> plan;
};

struct ProtocolOptions {
  // Fidelity against the analytic intermediate state after each top-level step.
  bool verify_steps = true;
  // Compare merge phases against the ideal e^{-2 pi i l l'/q} at every level.
  bool check_merge_phase = true;
  // Keep step records of nested recursion calls, not only the top level.
  bool record_nested = true;
  // Use dft(2) instead of hadamard() for qubits. Both are the same matrix.
  bool qubit_dft = false;
  // Scales every merge duration; anything but 1 breaks the protocol.
  double merge_time_scale = 1.0;
};

enum class StepKind { kBase = 0, kEncodeChildren = 1, kMerge = 2, kConcentrate = 3, kRotate = 4, kSpread = 5 };

struct StepRecord {
  int level = 0;  // plan level index of the node executing the step
  int depth = 0;  // 0 for the top-level call
  StepKind step = StepKind::kBase;
  bool inverse = false;
  std::vector<Region> regions;  // the subcubes the step acts on
  double start = 0.0;           // analytic clock
  double duration = 0.0;
  std::optional<double> fidelity;
  std::optional<double> merge_deviation;
};

struct ProtocolTrace {
  std::vector<StepRecord> steps;
  double final_fidelity = 0.0;
  double total_time = 0.0;
  bool forced_m = false;

  // Sum of durations of depth-0 records; equals total_time.
  double top_level_time() const;
  double max_merge_deviation() const;
  double min_step_fidelity() const;
};

// Runs the recursive routine so that
// (sum_l a_l |l>)_c |0...0>_{C\c} (x) rest  ->  sum_l a_l |l...l>_C (x) rest.
// The complement may be entangled with c; linearity carries it along.
ProtocolTrace encode(StateVector& state, const EncodeRequest& request,
                     const ProtocolOptions& options = {});

// Inverse of encode: concentrates a GHZ-like region state onto c.
ProtocolTrace decode(StateVector& state, const EncodeRequest& request,
                     const ProtocolOptions& options = {});

// encode at c followed by decode at c_prime. Analytic time is twice the
// plan's root time; c == c_prime is a no-op taking time 0.
ProtocolTrace state_transfer(StateVector& state, const LatticeSpec& lattice, const Coord& c,
                             const Coord& c_prime, const Region& region,
                             std::shared_ptr<const SchedulePlan> plan,
                             const ProtocolOptions& options = {});

// Analytic expected states of one top-level call, built from the input state
// by linearity: the input is split into branches sum_l |l>_c (x) |phi_l>.
class StepVerifier {
 public:
  enum class Input { kConcentrated, kGhz };

  StepVerifier(const StateVector& input, const EncodeRequest& request, Input form);

  // Expected state after encode step 0 (base) .. 5; decode reuses these in
  // reverse order, with the concentrated input as "step 0 of the inverse".
  StateVector expected(StepKind step) const;
  StateVector concentrated() const;
  // Same branches moved onto another site of the region.
  StateVector concentrated_at(std::size_t flat_site) const;

  double verify(const StateVector& state, StepKind step) const;

 private:
  struct Term {
    std::size_t offset;
    std::complex<double> amp;
  };
  StateVector assemble(const std::vector<std::vector<Term>>& branches) const;

  LatticeSpec lattice_;
  int q_ = 2;
  std::vector<std::size_t> region_sites_;
  std::size_t info_site_ = 0;
  std::vector<std::vector<std::size_t>> sub_sites_;  // masks, index 0 holds c
  std::vector<std::size_t> designated_;              // c_j per subcube
  std::vector<std::size_t> complement_offsets_;
  std::vector<std::vector<std::complex<double>>> branches_;  // phi_l per complement offset
};

// Fidelity of `state` with the expected state after `step` of the top-level
// call described by `verifier`. Step ids outside 0..5 throw kInvalidArgument.
double verify_step(const StateVector& state, int step, const StepVerifier& verifier);

}  // namespace lrghz
