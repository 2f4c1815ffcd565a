#include "msc/core/circuit.hpp"

#include "msc/core/errors.hpp"

namespace msc {

const char* to_string(CircuitStatus status) noexcept {
  switch (status) {
    case CircuitStatus::running: return "running";
    case CircuitStatus::converged: return "converged";
    case CircuitStatus::no_solution: return "no_solution";
    case CircuitStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

Circuit::Circuit(std::vector<Stage> stages, Field forward_input, Field backward_input,
                 CircuitParams params)
    : stages_(std::move(stages)), params_(params) {
  if (stages_.empty()) throw ContractError("circuit needs at least one stage");
  for (std::size_t s = 1; s < stages_.size(); ++s)
    if (stages_[s].family().input_space() != stages_[s - 1].family().output_space())
      throw ContractError("stage " + std::to_string(s) + " input space does not match stage " +
                          std::to_string(s - 1) + " output space");
  if (params_.max_iterations <= 0 || params_.stall_window <= 0)
    throw ContractError("iteration limits must be positive");
  const std::size_t m = stages_.size();
  forward_.resize(m + 1);
  backward_.resize(m + 1);
  for (std::size_t s = 0; s < m; ++s) {
    forward_[s + 1] = Field(stages_[s].family().output_space());
    backward_[s] = Field(stages_[s].family().input_space());
  }
  set_forward_input(std::move(forward_input));
  set_backward_input(std::move(backward_input));
  degenerate_.assign(m, false);
}

void Circuit::set_forward_input(Field f0) {
  if (f0.space() != stages_.front().family().input_space())
    throw ContractError("forward input is on " + f0.space().describe() + ", expected " +
                        stages_.front().family().input_space().describe());
  forward_.front() = std::move(f0);
}

void Circuit::set_backward_input(Field b_top) {
  if (b_top.space() != stages_.back().family().output_space())
    throw ContractError("backward input is on " + b_top.space().describe() + ", expected " +
                        stages_.back().family().output_space().describe());
  backward_.back() = std::move(b_top);
}

Field Circuit::backward_through(std::size_t s, const Field& in,
                                const std::vector<double>& gains) const {
  const auto& family = stages_[s].family();
  std::vector<Field> parts;
  std::vector<WeightedField> weighted;
  parts.reserve(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (gains[j] == 0.0) continue;
    parts.push_back(family[j].adjoint(in));
  }
  std::size_t k = 0;
  for (std::size_t j = 0; j < family.size(); ++j)
    if (gains[j] != 0.0) weighted.push_back({gains[j], &parts[k++]});
  Field out = aggregate(family.input_space(), weighted, params_.aggregation);
  if (s > 0 && stages_[s - 1].mask()) out = stages_[s - 1].mask()->apply(out);
  return out;
}

void Circuit::backward_pass() {
  const std::size_t m = stages_.size();
  const std::size_t lowest = params_.backward_to_input ? 0 : 1;
  for (std::size_t s = m; s-- > lowest;) {
    const auto gains = std::vector<double>(stages_[s].gains().begin(), stages_[s].gains().end());
    pass_applications_ += stages_[s].live_count();
    backward_[s] = backward_through(s, backward_[s + 1], gains);
  }
}

void Circuit::forward_pass() {
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    auto& stage = stages_[s];
    const auto& family = stage.family();
    const Field& input = forward_[s];
    const Field& relevant = backward_[s + 1];
    std::vector<Field> parts;
    std::vector<std::size_t> owners;
    parts.reserve(stage.live_count());
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (stage.gain(j) == 0.0) {
        stage.set_correspondence(j, 0.0);
        continue;
      }
      parts.push_back(family[j].apply(input, &relevant));
      ++pass_applications_;
      stage.set_correspondence(j, correspondence(relevant, parts.back()));
      owners.push_back(j);
    }
    std::vector<WeightedField> weighted;
    weighted.reserve(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k)
      weighted.push_back({stage.gain(owners[k]), &parts[k]});
    Field out = aggregate(family.output_space(), weighted, params_.aggregation);
    if (stage.mask()) out = stage.mask()->apply(out);
    forward_[s + 1] = std::move(out);
  }
}

void Circuit::update_gains() {
  changed_ = false;
  for (auto& stage : stages_) changed_ = stage.update_gains(params_.gain_rule) || changed_;
}

bool Circuit::resolve_stall() {
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    auto& stage = stages_[s];
    const auto& family = stage.family();
    for (int g = 0; g < family.group_count(); ++g) {
      if (stage.live_count(g) < 2) continue;
      bool kept = false;
      for (std::size_t j = 0; j < family.size(); ++j) {
        if (family.group(j) != g || stage.gain(j) == 0.0) continue;
        if (kept) stage.kill(j);
        kept = true;
      }
      degenerate_[s] = true;
      return true;
    }
  }
  return false;
}

CircuitStatus Circuit::evaluate_termination() {
  auto classify = [this] {
    bool all_single = true;
    for (const auto& stage : stages_)
      for (int g = 0; g < stage.family().group_count(); ++g) {
        const auto n = stage.live_count(g);
        if (n == 0) return CircuitStatus::no_solution;
        if (n > 1) all_single = false;
      }
    return all_single ? CircuitStatus::converged : CircuitStatus::running;
  };
  status_ = classify();
  if (status_ != CircuitStatus::running) return status_;
  stall_count_ = changed_ ? 0 : stall_count_ + 1;
  if (stall_count_ >= params_.stall_window) {
    stall_count_ = 0;
    if (resolve_stall()) status_ = classify();
    if (status_ != CircuitStatus::running) return status_;
  }
  if (iterations_ >= params_.max_iterations) status_ = CircuitStatus::max_iterations;
  return status_;
}

CircuitStatus Circuit::iterate() {
  if (status_ != CircuitStatus::running) return status_;
  begin_iteration();
  backward_pass();
  forward_pass();
  return complete_iteration();
}

CircuitStatus Circuit::complete_iteration() {
  if (status_ != CircuitStatus::running) {
    last_applications_ = pass_applications_;
    return status_;
  }
  IterationRecord record;
  if (params_.record_history) {
    record.iteration = iterations_ + 1;
    for (const auto& stage : stages_)
      record.q.emplace_back(stage.correspondences().begin(), stage.correspondences().end());
  }
  update_gains();
  ++iterations_;
  last_applications_ = pass_applications_;
  if (params_.record_history) {
    record.gains_after = gains();
    record.applications = last_applications_;
    history_.push_back(std::move(record));
  }
  return evaluate_termination();
}

CircuitStatus Circuit::run() {
  while (iterate() == CircuitStatus::running) {
  }
  return status_;
}

bool Circuit::any_degenerate() const noexcept {
  for (bool d : degenerate_)
    if (d) return true;
  return false;
}

GainSet Circuit::gains() const {
  GainSet out;
  out.reserve(stages_.size());
  for (const auto& stage : stages_) out.emplace_back(stage.gains().begin(), stage.gains().end());
  return out;
}

double Circuit::objective() const { return objective(gains()); }

double Circuit::objective(const GainSet& gains) const {
  if (params_.aggregation.mode != AggregationPolicy::Mode::superposition)
    throw ContractError("the objective is defined for superposition aggregation only");
  if (gains.size() != stages_.size()) throw ContractError("gain set has the wrong stage count");
  Field b = backward_.back();
  for (std::size_t s = stages_.size(); s-- > 0;) {
    if (gains[s].size() != stages_[s].size()) throw ContractError("gain set size mismatch");
    b = backward_through(s, b, gains[s]);
  }
  return correspondence(forward_.front(), b);
}

std::size_t Circuit::application_bound() const noexcept {
  std::size_t n = 0;
  for (const auto& stage : stages_) n += stage.size();
  return 2 * n;
}

std::optional<Composition> Circuit::solution() const {
  Composition out;
  for (const auto& stage : stages_) {
    auto s = stage.survivors();
    for (int v : s)
      if (v < 0) return std::nullopt;
    out.push_back(std::move(s));
  }
  return out;
}

Composition Circuit::leaders() const {
  Composition out;
  for (const auto& stage : stages_) out.push_back(stage.leaders());
  return out;
}

}  // namespace msc
