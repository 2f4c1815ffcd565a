#include "msc/kinematics/ik.hpp"

#include "msc/core/errors.hpp"

namespace msc::kinematics {

Circuit build_ik_circuit(const SkeletonModel& model, int chain, Field proximal, Field targets,
                         const std::vector<std::optional<MaskField>>& masks, CircuitParams params,
                         double rate) {
  const auto& spec = model.chain(static_cast<std::size_t>(chain));
  if (proximal.empty()) throw ContractError("IK needs at least one proximal locus");
  if (targets.empty()) throw ContractError("IK needs a nonempty target field");
  if (!masks.empty() && masks.size() != spec.segments.size())
    throw ContractError("one optional mask per chain segment is required");
  std::vector<Stage> stages;
  for (std::size_t k = 0; k < spec.segments.size(); ++k) {
    Stage stage(make_lambda_family(model.grid(), model.segment(static_cast<std::size_t>(spec.segments[k]))),
                rate);
    if (!masks.empty()) stage.set_mask(masks[k]);
    stages.push_back(std::move(stage));
  }
  // The end-effector mask only touches f^m inside the circuit, so it also
  // filters the targets.
  if (!masks.empty() && masks.back()) targets = masks.back()->apply(targets);
  if (targets.empty()) throw ContractError("every IK target is masked out");
  return Circuit(std::move(stages), std::move(proximal), std::move(targets), params);
}

Field chain_handoff(const SkeletonModel& model, const PoseSolution& upstream, int upstream_chain) {
  const int end = model.chain(static_cast<std::size_t>(upstream_chain)).segments.back();
  return Field::impulse(model.grid(), model.grid().key(upstream.distal.at(static_cast<std::size_t>(end))));
}

Field chain_handoff(const Circuit& upstream) {
  return upstream.forward_field(upstream.stage_count());
}

std::optional<ChainPose> trace_chain(const SkeletonModel& model, int chain, const Circuit& circuit) {
  const auto& spec = model.chain(static_cast<std::size_t>(chain));
  const auto& grid = model.grid();
  const auto leaders = circuit.leaders();
  ChainPose pose;
  for (std::size_t k = 0; k < spec.segments.size(); ++k) {
    if (leaders[k][0] < 0) return std::nullopt;
    pose.indices.push_back(leaders[k][0]);
  }
  const Field& targets = circuit.backward_input();
  double best_score = -1.0;
  for (const auto& e : circuit.forward_input().entries()) {
    Voxel at = grid.voxel(e.key);
    std::vector<Voxel> prox;
    std::vector<Voxel> dist;
    bool inside = true;
    for (std::size_t k = 0; k < spec.segments.size() && inside; ++k) {
      const auto& seg = model.segment(static_cast<std::size_t>(spec.segments[k]));
      prox.push_back(at);
      at = at + seg.displacements[static_cast<std::size_t>(pose.indices[k])];
      inside = grid.contains(at);
      dist.push_back(at);
    }
    if (!inside) continue;
    const double score = e.weight * targets.weight(grid.key(at));
    if (score > best_score) {
      best_score = score;
      pose.proximal = std::move(prox);
      pose.distal = std::move(dist);
    }
  }
  if (best_score < 0.0) return std::nullopt;
  return pose;
}

IkResult solve_ik(const SkeletonModel& model, int chain, Field proximal, Field targets,
                  const std::vector<std::optional<MaskField>>& masks, CircuitParams params,
                  double rate) {
  auto circuit = build_ik_circuit(model, chain, std::move(proximal), std::move(targets), masks,
                                  params, rate);
  IkResult result;
  result.application_bound = circuit.application_bound();
  while (circuit.iterate() == CircuitStatus::running)
    result.max_applications = std::max(result.max_applications, circuit.applications_last_iteration());
  result.max_applications = std::max(result.max_applications, circuit.applications_last_iteration());
  result.status = circuit.status();
  result.iterations = circuit.iterations();
  result.degenerate = circuit.any_degenerate();
  if (result.status == CircuitStatus::converged) result.pose = trace_chain(model, chain, circuit);
  return result;
}

}  // namespace msc::kinematics
