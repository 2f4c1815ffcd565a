#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "msc/core/stage.hpp"

namespace msc {

enum class CircuitStatus { running, converged, no_solution, max_iterations };

const char* to_string(CircuitStatus status) noexcept;

struct CircuitParams {
  GainRule gain_rule;
  int max_iterations = 200;
  // Iterations without any gain change before a tied competition is resolved.
  int stall_window = 10;
  AggregationPolicy aggregation;
  // Also compute the backward aggregate on the input space (normally skipped).
  bool backward_to_input = false;
  bool record_history = true;
};

// Per stage, per competition group: the chosen member index.
using Composition = std::vector<std::vector<int>>;
// Per stage gain vectors.
using GainSet = std::vector<std::vector<double>>;

struct IterationRecord {
  int iteration = 0;
  GainSet q;
  GainSet gains_after;
  std::size_t applications = 0;
};

// A map-seeking circuit over stages 0..m-1. Stage s maps space s to space s+1.
// Space 0 carries the input field f0, space m the backward input b_top.
// forward_field(s) is the forward aggregate on space s (s=0 is f0);
// backward_field(s) is the backward aggregate arriving at space s
// (s=m is b_top, s=0 only with backward_to_input).
// A stage mask applies to its output space, on both passes.
class Circuit {
 public:
  Circuit(std::vector<Stage> stages, Field forward_input, Field backward_input,
          CircuitParams params = {});

  std::size_t stage_count() const noexcept { return stages_.size(); }
  Stage& stage(std::size_t s) { return stages_.at(s); }
  const Stage& stage(std::size_t s) const { return stages_.at(s); }
  const CircuitParams& params() const noexcept { return params_; }

  const Field& forward_input() const noexcept { return forward_.front(); }
  const Field& backward_input() const noexcept { return backward_.back(); }
  void set_forward_input(Field f0);
  void set_backward_input(Field b_top);

  const Field& forward_field(std::size_t space) const { return forward_.at(space); }
  const Field& backward_field(std::size_t space) const { return backward_.at(space); }

  void backward_pass();
  void forward_pass();
  // Updates every stage from the correspondences of the last forward pass.
  void update_gains();
  CircuitStatus evaluate_termination();

  // One full iteration. A terminal circuit is left untouched.
  CircuitStatus iterate();

  // Split form of iterate() for circuits whose inputs change between passes:
  // begin_iteration(), backward_pass(), forward_pass(), complete_iteration().
  // On a terminal circuit the passes still refresh the fields, and
  // complete_iteration() only publishes the application count.
  void begin_iteration() noexcept { pass_applications_ = 0; }
  CircuitStatus complete_iteration();
  CircuitStatus run();

  CircuitStatus status() const noexcept { return status_; }
  int iterations() const noexcept { return iterations_; }
  const std::vector<bool>& degenerate() const noexcept { return degenerate_; }
  bool any_degenerate() const noexcept;

  // Objective at the current gains (superposition only).
  double objective() const;
  // Objective at arbitrary gains; members with zero gain are skipped.
  double objective(const GainSet& gains) const;
  GainSet gains() const;

  std::size_t applications_last_iteration() const noexcept { return last_applications_; }
  // Two applications per member per iteration.
  std::size_t application_bound() const noexcept;

  // Survivor composition when every group has exactly one live member.
  std::optional<Composition> solution() const;
  // Leading member of each group (see Stage::leaders).
  Composition leaders() const;

  const std::vector<IterationRecord>& history() const noexcept { return history_; }

 private:
  Field backward_through(std::size_t s, const Field& in, const std::vector<double>& gains) const;
  bool resolve_stall();

  std::vector<Stage> stages_;
  CircuitParams params_;
  std::vector<Field> forward_;
  std::vector<Field> backward_;
  CircuitStatus status_ = CircuitStatus::running;
  int iterations_ = 0;
  int stall_count_ = 0;
  bool changed_ = false;
  std::size_t pass_applications_ = 0;
  std::size_t last_applications_ = 0;
  std::vector<bool> degenerate_;
  std::vector<IterationRecord> history_;
};

}  // namespace msc
