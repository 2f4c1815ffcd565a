#include "msc/pipeline/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "msc/constraints/gravity.hpp"
#include "msc/core/collusion.hpp"
#include "msc/core/errors.hpp"
#include "msc/core/exhaustive.hpp"
#include "msc/pipeline/pose_solver.hpp"

namespace msc::pipeline {

using constraints::ImagePoint;
using kinematics::Vec3;

bool ReconstructionResult::self_consistent(double tolerance) const {
  return rerender_correspondence && std::abs(*rerender_correspondence - correspondence) <= tolerance;
}

std::vector<std::vector<ImagePoint>> joint_lobes(const Field& evidence,
                                                 const kinematics::SkeletonModel& model,
                                                 const morph::ViewAngles& view, int count) {
  const auto& grid = model.grid();
  const auto rotation = morph::make_view_rotation(grid, view);
  const Space& pairs = evidence.space();
  std::vector<std::map<std::pair<int, int>, double>> best(model.segments().size());
  for (const auto& e : evidence.entries()) {
    const SegmentPair p = pairs.pair(e.key);
    const Voxel d = rotation.map_cell(p.distal);
    if (!grid.contains(d)) continue;
    auto& slot = best[static_cast<std::size_t>(p.segment)][{d.y, d.x}];
    slot = std::max(slot, e.weight);
  }
  std::vector<std::vector<ImagePoint>> out(best.size());
  for (std::size_t s = 0; s < best.size(); ++s) {
    std::vector<std::pair<double, std::pair<int, int>>> ranked;
    for (const auto& [yx, w] : best[s]) ranked.push_back({w, yx});
    // Strongest first; ties keep row-major order.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < count; ++i)
      out[s].push_back({ranked[i].second.second, ranked[i].second.first,
                        ranked[i].first / ranked.front().first});
  }
  return out;
}

namespace {

// Point of the body-frame line of view through `lobe` closest to `target`,
// moved onto the ground plane.
Vec3 support_on_line(const ImagePoint& lobe, const Eigen::Matrix3d& view, const Vec3& center,
                     const Vec3& target, const constraints::GroundPlane& plane) {
  const Vec3 origin = view.transpose() * (Vec3(lobe.x, lobe.y, center.z()) - center) + center;
  const Vec3 dir = view.transpose() * Vec3::UnitZ();
  Vec3 p = origin + dir * dir.dot(target - origin);
  p[plane.axis] = plane.height;
  return p;
}

struct GravityStep {
  std::map<int, MaskField> end_masks;
};

GravityStep gravity_masks(const PipelineConfig& config, const kinematics::PoseSolution& pose,
                          const std::vector<std::vector<ImagePoint>>& lobes,
                          const morph::ViewAngles& view) {
  const auto& model = config.model();
  const auto& g = config.constraints.gravity;
  const Vec3 com = constraints::estimate_center_of_mass(pose, model);
  const Eigen::Matrix3d m = morph::view_rotation(view);
  const Vec3 center(model.grid().nx() / 2, model.grid().ny() / 2, model.grid().nz() / 2);
  std::vector<Vec3> supports;
  std::vector<int> chains;
  for (const auto& name : g.chains) {
    const int c = model.chain_index(name);
    const int ankle = model.chain(static_cast<std::size_t>(c)).segments.back();
    const auto& l = lobes[static_cast<std::size_t>(ankle)];
    if (l.empty()) return {};
    chains.push_back(c);
    supports.push_back(support_on_line(l.front(), m, center, com, g.plane));
  }
  const auto region =
      constraints::gravity_support_mask(model.grid(), com, supports[0], supports[1], g.plane, g.radius);
  const auto ankles = constraints::ankle_mask_for(model, region.mask, g.support);
  GravityStep step;
  for (int c : chains) step.end_masks.emplace(c, ankles);
  return step;
}

StabilityReport assess_stability(const PipelineConfig& config,
                                 const kinematics::PoseSolution& pose) {
  const auto& model = config.model();
  const auto& g = config.constraints.gravity;
  StabilityReport report;
  report.center_of_mass = constraints::estimate_center_of_mass(pose, model);
  std::vector<Vec3> supports;
  for (const auto& name : g.chains) {
    const int c = model.chain_index(name);
    const int ankle = model.chain(static_cast<std::size_t>(c)).segments.back();
    Vec3 p = constraints::support_point(model, pose.distal[static_cast<std::size_t>(ankle)], g.support);
    // Measure in the plane even when a foot hovers above it.
    p[g.plane.axis] = g.plane.height;
    supports.push_back(p);
  }
  const auto region = constraints::gravity_support_mask(model.grid(), report.center_of_mass,
                                                        supports[0], supports[1], g.plane, g.radius);
  report.statically_unstable = region.statically_unstable;
  report.com_offset = region.com_offset;
  report.diagnostic = region.diagnostic;
  return report;
}

std::vector<std::optional<MaskField>> obstacle_masks(const PipelineConfig& config) {
  const auto& model = config.model();
  std::vector<std::optional<MaskField>> out(model.segments().size());
  if (config.constraints.obstacles.empty()) return out;
  const auto mask = constraints::obstacle_mask(model.grid(), config.constraints.obstacles);
  for (auto& m : out) m = mask;
  return out;
}

}  // namespace

ReconstructionResult reconstruct(const Field& input, const PipelineConfig& config,
                                 const ReconstructOptions& options) {
  const VisualSearch search(config);
  if (input.space() != search.image())
    throw ConfigError("input is " + input.space().describe() + " but the skeleton grid needs " +
                      search.image().describe());
  const auto& model = config.model();
  const auto& grid = model.grid();

  KinematicSweep kinematics(model, config.msc, obstacle_masks(config));
  Field top = config.start == StartMode::canonical
                  ? pose_keys(search.pairs(),
                              kinematics::forward_kinematics(model, kinematics::canonical_indices(model)))
                  : kinematics.hypotheses(search.pairs());
  auto params = config.msc.circuit_params();
  params.record_history = options.reference.has_value();
  Circuit visual(search.stages(), input, std::move(top), params);

  ReconstructionResult result;
  result.application_bound = visual.application_bound() + kinematics.application_bound();
  const auto& los = config.constraints.line_of_view;
  for (int it = 0; it < config.msc.max_iterations; ++it) {
    visual.begin_iteration();
    visual.backward_pass();
    visual.forward_pass();
    visual.complete_iteration();
    result.iterations = it + 1;
    if (visual.status() == CircuitStatus::no_solution) break;

    // Joint lobes from the evidence each hypothesis received.
    const Field& evidence = visual.forward_field(search.view().size() > 0 ? 5 : 0);
    const int view_index = visual.leaders()[VisualSearch::view_stage][0];
    const auto& view = search.views().at(static_cast<std::size_t>(std::max(view_index, 0)));
    const auto lobes = joint_lobes(evidence, model, view, config.constraints.lobes);
    const Eigen::Matrix3d rotation = morph::view_rotation(view);
    std::vector<std::optional<MaskField>> joint_masks(model.segments().size());
    for (std::size_t s = 0; s < lobes.size(); ++s)
      if (!lobes[s].empty())
        joint_masks[s] = constraints::line_of_view_mask_for_view(grid, lobes[s], rotation, los);

    // Support constraints need settled visual parameters to place the feet.
    std::map<int, MaskField> end_masks;
    if (config.constraints.gravity.enabled && visual.status() == CircuitStatus::converged)
      if (const auto pose = kinematics.leader_pose())
        end_masks = gravity_masks(config, *pose, lobes, view).end_masks;

    kinematics.sweep(joint_masks, end_masks);
    result.max_applications =
        std::max(result.max_applications,
                 visual.applications_last_iteration() + kinematics.applications_last_sweep());
    if (kinematics.no_solution()) break;
    visual.set_backward_input(kinematics.hypotheses(search.pairs()));
    if (visual.status() == CircuitStatus::converged && kinematics.converged()) break;
  }

  if (visual.status() == CircuitStatus::no_solution || kinematics.no_solution())
    result.status = CircuitStatus::no_solution;
  else if (visual.status() == CircuitStatus::converged && kinematics.converged())
    result.status = CircuitStatus::converged;
  else
    result.status = CircuitStatus::max_iterations;

  const auto leaders = visual.leaders();
  result.visual_degenerate = visual.degenerate();
  result.pose_degenerate = kinematics.degenerate();
  result.solution.pose = kinematics.leader_indices();
  bool resolved = true;
  for (const auto& stage : leaders)
    for (int v : stage) resolved = resolved && v >= 0;
  if (resolved) {
    const auto pose = result.solution.pose;
    result.solution = search.plant_of(leaders);
    result.solution.pose = pose;
  }
  result.joints = kinematics.leader_pose();

  if (resolved && result.joints) {
    visual.set_backward_input(pose_keys(search.pairs(), *result.joints));
    result.correspondence = composition_value(visual, leaders);
    result.rerender_correspondence = correspondence(input, render_direct(search, result.solution));
    if (config.constraints.gravity.enabled) result.stability = assess_stability(config, *result.joints);
  }

  if (options.reference && params.record_history) {
    const auto& ref = *options.reference;
    const auto trace = trace_collusion(visual, search.composition_of(ref));
    if (!(result.solution == ref) && trace.explains_mismatch())
      result.collusion.push_back("visual: " + trace.summary());
    for (std::size_t c = 0; c < model.chains().size(); ++c) {
      const auto& segs = model.chain(c).segments;
      Composition chain_ref;
      for (int s : segs) chain_ref.push_back({ref.pose.at(static_cast<std::size_t>(s))});
      const auto t = trace_collusion(kinematics.chain_circuit(static_cast<int>(c)), chain_ref);
      bool match = true;
      for (int s : segs)
        match = match && result.solution.pose[static_cast<std::size_t>(s)] ==
                             ref.pose[static_cast<std::size_t>(s)];
      if (!match && t.explains_mismatch())
        result.collusion.push_back(model.chain(c).name + ": " + t.summary());
    }
    if (!(result.solution == ref) && result.collusion.empty())
      result.collusion.push_back("no ordering inversion recorded; the reference lost on gain ties");
  }
  return result;
}

}  // namespace msc::pipeline
