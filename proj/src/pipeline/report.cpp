#include "msc/pipeline/report.hpp"

#include <algorithm>
#include <sstream>

#include "msc/core/errors.hpp"

namespace msc::pipeline {

using nlohmann::ordered_json;

namespace {

ordered_json voxel_json(const Voxel& v) { return ordered_json::array({v.x, v.y, v.z}); }

ordered_json visual_json(const VisualSearch& search, const PlantSpec& plant) {
  const auto& spec = search.config().visual;
  const auto& shift = spec.shifts.at(plant.visual.shift);
  const auto& view = search.views().at(plant.view);
  ordered_json j;
  j["shift"] = {{"index", plant.visual.shift}, {"dx", shift.dx}, {"dy", shift.dy}};
  j["scale"] = {{"index", plant.visual.scale}, {"factor", spec.scales.at(plant.visual.scale)}};
  j["rot2d"] = {{"index", plant.visual.rotation},
                {"degrees", spec.rotations_deg.at(plant.visual.rotation)}};
  j["view"] = {{"index", plant.view},
               {"azimuth", view.azimuth_deg},
               {"elevation", view.elevation_deg}};
  return j;
}

bool visual_resolved(const VisualSearch& search, const PlantSpec& plant) {
  const auto& spec = search.config().visual;
  return plant.visual.shift < spec.shifts.size() && plant.visual.scale < spec.scales.size() &&
         plant.visual.rotation < spec.rotations_deg.size() && plant.view < search.views().size();
}

ordered_json segments_json(const VisualSearch& search, const PlantSpec& plant) {
  const auto& model = search.model();
  ordered_json out = ordered_json::array();
  for (std::size_t s = 0; s < model.segments().size(); ++s) {
    const auto& seg = model.segment(s);
    ordered_json j;
    j["name"] = seg.name;
    const int variant = s < plant.variants.size() ? plant.variants[s] : -1;
    const int pose = s < plant.pose.size() ? plant.pose[s] : -1;
    j["variant"] = variant;
    if (variant >= 0) j["width"] = seg.base_width * search.widths()[s].at(static_cast<std::size_t>(variant));
    j["orientation"] = pose;
    if (pose >= 0) {
      const auto& o = seg.orientations.at(static_cast<std::size_t>(pose));
      j["direction"] = {o.x(), o.y(), o.z()};
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<int> parse_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 0)
      throw ConfigError("bad " + what + " index '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ordered_json plant_json(const VisualSearch& search, const PlantSpec& plant) {
  ordered_json j;
  j["schema"] = report_schema;
  j["visual"] = visual_json(search, plant);
  j["segments"] = segments_json(search, plant);
  if (std::find(plant.pose.begin(), plant.pose.end(), -1) == plant.pose.end())
    j["joints"] = joints_json(search.model(), kinematics::forward_kinematics(search.model(), plant.pose));
  return j;
}

ordered_json joints_json(const kinematics::SkeletonModel& model,
                         const kinematics::PoseSolution& joints) {
  ordered_json out = ordered_json::array();
  for (std::size_t s = 0; s < joints.proximal.size(); ++s)
    out.push_back({{"segment", model.segment(s).name},
                   {"proximal", voxel_json(joints.proximal[s])},
                   {"distal", voxel_json(joints.distal[s])}});
  return out;
}

ordered_json result_json(const VisualSearch& search, const ReconstructionResult& result) {
  ordered_json j;
  j["schema"] = report_schema;
  j["status"] = to_string(result.status);
  j["iterations"] = result.iterations;
  j["visual"] = visual_resolved(search, result.solution) ? visual_json(search, result.solution)
                                                         : ordered_json(nullptr);
  j["segments"] = segments_json(search, result.solution);
  j["joints"] = result.joints ? joints_json(search.model(), *result.joints) : ordered_json(nullptr);
  j["correspondence"] = result.correspondence;
  j["rerender_correspondence"] =
      result.rerender_correspondence ? ordered_json(*result.rerender_correspondence) : ordered_json(nullptr);

  ordered_json diag;
  diag["visual_degenerate"] = result.visual_degenerate;
  diag["pose_degenerate"] = result.pose_degenerate;
  diag["collusion"] = result.collusion;
  if (result.stability) {
    const auto& s = *result.stability;
    ordered_json st;
    st["statically_unstable"] = s.statically_unstable;
    st["com_offset"] = s.com_offset;
    st["center_of_mass"] = {s.center_of_mass.x(), s.center_of_mass.y(), s.center_of_mass.z()};
    st["diagnostic"] = s.diagnostic ? ordered_json(*s.diagnostic) : ordered_json(nullptr);
    diag["stability"] = std::move(st);
  } else {
    diag["stability"] = nullptr;
  }
  j["diagnostics"] = std::move(diag);
  j["cost"] = {{"max_applications_per_iteration", result.max_applications},
               {"application_bound", result.application_bound}};
  return j;
}

ordered_json oracle_json(const VisualSearch& search, const OracleResult& result) {
  ordered_json j = plant_json(search, result.best);
  j["correspondence"] = result.value;
  j["search_product"] = result.product;
  j["segment_hypotheses_scored"] = result.evaluated;
  return j;
}

ordered_json ik_json(const kinematics::SkeletonModel& model, int chain,
                     const kinematics::IkResult& result) {
  ordered_json j;
  j["schema"] = report_schema;
  j["chain"] = model.chain(static_cast<std::size_t>(chain)).name;
  j["status"] = to_string(result.status);
  j["iterations"] = result.iterations;
  j["degenerate"] = result.degenerate;
  if (result.pose) {
    const auto& segs = model.chain(static_cast<std::size_t>(chain)).segments;
    ordered_json joints = ordered_json::array();
    for (std::size_t i = 0; i < segs.size(); ++i)
      joints.push_back({{"segment", model.segment(static_cast<std::size_t>(segs[i])).name},
                        {"orientation", result.pose->indices[i]},
                        {"proximal", voxel_json(result.pose->proximal[i])},
                        {"distal", voxel_json(result.pose->distal[i])}});
    j["joints"] = std::move(joints);
    j["end_effector"] = voxel_json(result.pose->distal.back());
  } else {
    j["joints"] = nullptr;
    j["end_effector"] = nullptr;
  }
  j["cost"] = {{"max_applications_per_iteration", result.max_applications},
               {"application_bound", result.application_bound}};
  return j;
}

ordered_json error_json(const std::exception& error) {
  ordered_json e;
  if (const auto* p = dynamic_cast<const ParseError*>(&error)) {
    e["kind"] = "parse";
    e["line"] = p->line();
    e["offset"] = p->offset();
  } else if (const auto* b = dynamic_cast<const BudgetExceeded*>(&error)) {
    e["kind"] = "budget_exceeded";
    e["product"] = b->product();
    e["budget"] = b->budget();
  } else if (const auto* o = dynamic_cast<const OutOfBoundsError*>(&error)) {
    e["kind"] = "out_of_bounds";
    e["segment"] = o->segment();
  } else if (dynamic_cast<const ConfigError*>(&error)) {
    e["kind"] = "config";
  } else if (dynamic_cast<const ContractError*>(&error)) {
    e["kind"] = "contract";
  } else {
    e["kind"] = "runtime";
  }
  e["message"] = error.what();
  ordered_json j;
  j["schema"] = report_schema;
  j["error"] = std::move(e);
  return j;
}

PlantSpec parse_plant_indices(const VisualSearch& search, const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) parts.push_back(part);
  if (parts.size() != 3)
    throw ConfigError("indices need three ';'-separated groups: visual;variants;pose");
  const auto visual = parse_list(parts[0], "visual");
  const auto variants = parse_list(parts[1], "variant");
  const auto pose = parse_list(parts[2], "pose");
  const auto& model = search.model();
  const std::size_t n = model.segments().size();
  if (visual.size() != 4) throw ConfigError("visual group needs shift,scale,rotation,view");
  if (variants.size() != n || pose.size() != n)
    throw ConfigError("variant and pose groups need " + std::to_string(n) + " entries each");

  PlantSpec plant;
  plant.visual = {static_cast<std::size_t>(visual[0]), static_cast<std::size_t>(visual[1]),
                  static_cast<std::size_t>(visual[2])};
  plant.view = static_cast<std::size_t>(visual[3]);
  if (!visual_resolved(search, plant)) throw ConfigError("visual index out of range");
  for (std::size_t s = 0; s < n; ++s) {
    if (static_cast<std::size_t>(variants[s]) >= search.widths()[s].size())
      throw ConfigError("variant index out of range for " + model.segment(s).name);
    if (static_cast<std::size_t>(pose[s]) >= model.segment(s).orientations.size())
      throw ConfigError("orientation index out of range for " + model.segment(s).name);
  }
  plant.variants = variants;
  plant.pose = pose;
  return plant;
}

}  // namespace msc::pipeline
