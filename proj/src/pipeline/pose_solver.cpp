#include "msc/pipeline/pose_solver.hpp"

#include <algorithm>

#include "msc/core/errors.hpp"

namespace msc::pipeline {

using kinematics::SkeletonModel;

namespace {

Field support_of(const Field& f) {
  std::vector<Entry> e;
  e.reserve(f.size());
  for (const auto& x : f.entries()) e.push_back({x.key, 1.0});
  return Field::from_entries(f.space(), std::move(e));
}

std::optional<MaskField> combine(const std::optional<MaskField>& a,
                                 const std::optional<MaskField>& b) {
  if (!a) return b;
  if (!b) return a;
  return a->combined(*b);
}

}  // namespace

KinematicSweep::KinematicSweep(const SkeletonModel& model, const MscSettings& msc,
                               std::vector<std::optional<MaskField>> static_masks)
    : model_(&model), static_masks_(std::move(static_masks)) {
  const auto n_seg = model.segments().size();
  if (static_masks_.empty()) static_masks_.resize(n_seg);
  if (static_masks_.size() != n_seg) throw ContractError("one optional mask per segment expected");
  CircuitParams params = msc.circuit_params();
  params.backward_to_input = true;
  params.record_history = true;
  const auto& grid = model.grid();
  circuits_.reserve(model.chains().size());
  for (std::size_t c = 0; c < model.chains().size(); ++c) {
    std::vector<Stage> stages;
    for (int s : model.chain(c).segments) {
      Stage stage(kinematics::make_lambda_family(grid, model.segment(static_cast<std::size_t>(s))),
                  msc.rates.kinematic);
      stage.set_mask(static_masks_[static_cast<std::size_t>(s)]);
      stages.push_back(std::move(stage));
    }
    const Field root = Field::impulse(grid, grid.key(model.root()));
    circuits_.emplace_back(std::move(stages), root, root, params);
  }
  // Initial forward fields, so reachability and hypotheses exist before the
  // first sweep.
  for (int c : model.chain_order()) {
    auto& circuit = circuits_[static_cast<std::size_t>(c)];
    circuit.set_forward_input(chain_start(c));
    circuit.forward_pass();
  }
}

Field KinematicSweep::chain_start(int chain) const {
  const int up = model_->chain(static_cast<std::size_t>(chain)).upstream;
  if (up < 0) return Field::impulse(model_->grid(), model_->grid().key(model_->root()));
  const auto& upstream = circuits_[static_cast<std::size_t>(up)];
  return upstream.forward_field(upstream.stage_count());
}

void KinematicSweep::sweep(const std::vector<std::optional<MaskField>>& joint_masks,
                           const std::map<int, MaskField>& end_masks) {
  const auto n_seg = model_->segments().size();
  if (!joint_masks.empty() && joint_masks.size() != n_seg)
    throw ContractError("one optional joint mask per segment expected");
  for (std::size_t c = 0; c < circuits_.size(); ++c) {
    const auto& segs = model_->chain(c).segments;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const auto s = static_cast<std::size_t>(segs[k]);
      circuits_[c].stage(k).set_mask(
          combine(static_masks_[s], joint_masks.empty() ? std::nullopt : joint_masks[s]));
    }
  }

  // Leaves first: targets, then the backward field at each chain's start.
  const auto& order = model_->chain_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int c = *it;
    auto& circuit = circuits_[static_cast<std::size_t>(c)];
    const std::size_t m = circuit.stage_count();
    Field top = support_of(circuit.forward_field(m));
    if (const auto& mask = circuit.stage(m - 1).mask()) top = mask->apply(top);
    if (const auto e = end_masks.find(c); e != end_masks.end()) top = e->second.apply(top);
    for (int d : model_->downstream_of(c))
      top = multiply(top, circuits_[static_cast<std::size_t>(d)].backward_field(0));
    circuit.set_backward_input(std::move(top));
    circuit.begin_iteration();
    circuit.backward_pass();
  }

  // Root first: forward passes with handoff, then the gain competition.
  applications_ = 0;
  for (int c : order) {
    auto& circuit = circuits_[static_cast<std::size_t>(c)];
    circuit.set_forward_input(chain_start(c));
    circuit.forward_pass();
    circuit.complete_iteration();
    applications_ += circuit.applications_last_iteration();
  }
  ++sweeps_;
}

Field KinematicSweep::hypotheses(const Space& pairs) const {
  const auto& grid = model_->grid();
  std::vector<Entry> keys;
  std::vector<double> top(model_->segments().size(), 0.0);
  for (std::size_t c = 0; c < circuits_.size(); ++c) {
    const auto& circuit = circuits_[c];
    const auto& segs = model_->chain(c).segments;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const int s = segs[k];
      const auto& disp = model_->segment(static_cast<std::size_t>(s)).displacements;
      const auto& stage = circuit.stage(k);
      for (const auto& e : circuit.forward_field(k).entries()) {
        const Voxel p = grid.voxel(e.key);
        for (std::size_t j = 0; j < disp.size(); ++j) {
          const double g = stage.gain(j);
          if (g == 0.0) continue;
          const Voxel q = p + disp[j];
          if (!grid.contains(q)) continue;
          const double w = e.weight * g;
          keys.push_back({pairs.pair_key(s, p, q), w});
          top[static_cast<std::size_t>(s)] = std::max(top[static_cast<std::size_t>(s)], w);
        }
      }
    }
  }
  for (auto& e : keys) e.weight /= top[static_cast<std::size_t>(pairs.pair_segment(e.key))];
  return Field::from_entries(pairs, std::move(keys));
}

bool KinematicSweep::converged() const {
  return std::all_of(circuits_.begin(), circuits_.end(),
                     [](const Circuit& c) { return c.status() == CircuitStatus::converged; });
}

bool KinematicSweep::no_solution() const {
  return std::any_of(circuits_.begin(), circuits_.end(),
                     [](const Circuit& c) { return c.status() == CircuitStatus::no_solution; });
}

std::vector<int> KinematicSweep::leader_indices() const {
  std::vector<int> out(model_->segments().size(), -1);
  for (std::size_t c = 0; c < circuits_.size(); ++c) {
    const auto leaders = circuits_[c].leaders();
    const auto& segs = model_->chain(c).segments;
    for (std::size_t k = 0; k < segs.size(); ++k)
      out[static_cast<std::size_t>(segs[k])] = leaders[k][0];
  }
  return out;
}

std::optional<kinematics::PoseSolution> KinematicSweep::leader_pose() const {
  const auto idx = leader_indices();
  if (std::find(idx.begin(), idx.end(), -1) != idx.end()) return std::nullopt;
  try {
    auto pose = kinematics::forward_kinematics(*model_, idx);
    for (bool d : degenerate()) pose.degenerate = pose.degenerate || d;
    return pose;
  } catch (const OutOfBoundsError&) {
    return std::nullopt;
  }
}

std::vector<bool> KinematicSweep::degenerate() const {
  std::vector<bool> out(model_->segments().size(), false);
  for (std::size_t c = 0; c < circuits_.size(); ++c) {
    const auto& segs = model_->chain(c).segments;
    for (std::size_t k = 0; k < segs.size(); ++k)
      out[static_cast<std::size_t>(segs[k])] = circuits_[c].degenerate()[k];
  }
  return out;
}

std::size_t KinematicSweep::application_bound() const noexcept {
  std::size_t n = 0;
  for (const auto& c : circuits_) n += c.application_bound();
  return n;
}

}  // namespace msc::pipeline
