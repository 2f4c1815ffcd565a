#include "msc/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "msc/core/errors.hpp"

namespace msc::pipeline {

using nlohmann::json;

CircuitParams MscSettings::circuit_params() const {
  CircuitParams p;
  p.gain_rule = gain_rule;
  p.max_iterations = max_iterations;
  p.stall_window = stall_window;
  p.aggregation = aggregation;
  p.record_history = false;
  return p;
}

std::vector<std::vector<double>> MorphSettings::resolve(
    const kinematics::SkeletonModel& model) const {
  if (!(min_scale > 0.0 && min_scale <= max_scale))
    throw ConfigError("morph: need 0 < min_scale <= max_scale");
  for (const auto& [name, _] : per_segment) model.segment_index(name);
  std::vector<std::vector<double>> out;
  for (const auto& seg : model.segments()) {
    const auto it = per_segment.find(seg.name);
    const auto& list = it != per_segment.end() ? it->second : width_scales;
    if (list.empty()) throw ConfigError("morph: segment '" + seg.name + "' has no width scales");
    std::set<double> seen;
    for (double w : list) {
      if (!(w >= min_scale && w <= max_scale))
        throw ConfigError("morph: width scale " + std::to_string(w) + " outside [" +
                          std::to_string(min_scale) + ", " + std::to_string(max_scale) + "]");
      if (!seen.insert(w).second) throw ConfigError("morph: duplicate width scale");
    }
    out.push_back(list);
  }
  return out;
}

Space PipelineConfig::image_space() const {
  const auto& g = model().grid();
  return Space::grid2d(g.nx(), g.ny());
}

namespace {

std::vector<double> doubles(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be a list of numbers");
  return j.get<std::vector<double>>();
}

int axis_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<int>();
  const auto s = j.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  throw ConfigError("ground axis must be x, y or z");
}

MscSettings msc_from_json(const json& j) {
  MscSettings m;
  if (j.contains("rates")) {
    const auto& r = j.at("rates");
    m.rates.shift = r.value("shift", m.rates.shift);
    m.rates.scale = r.value("scale", m.rates.scale);
    m.rates.rotation = r.value("rotation", m.rates.rotation);
    m.rates.morph = r.value("morph", m.rates.morph);
    m.rates.view = r.value("view", m.rates.view);
    m.rates.kinematic = r.value("kinematic", m.rates.kinematic);
  }
  m.gain_rule.threshold = j.value("threshold", m.gain_rule.threshold);
  m.max_iterations = j.value("max_iterations", m.max_iterations);
  m.stall_window = j.value("stall_window", m.stall_window);
  if (j.contains("aggregation")) {
    const auto& a = j.at("aggregation");
    if (a.is_string() && a.get<std::string>() == "superposition")
      m.aggregation = AggregationPolicy::superposition();
    else if (a.is_object() && a.contains("lp"))
      m.aggregation = AggregationPolicy::lp_norm(a.at("lp").get<double>());
    else
      throw ConfigError("aggregation must be \"superposition\" or {\"lp\": p}");
  }
  if (m.max_iterations <= 0 || m.stall_window <= 0)
    throw ConfigError("max_iterations and stall_window must be positive");
  return m;
}

ConstraintSettings constraints_from_json(const json& j) {
  ConstraintSettings c;
  if (j.contains("line_of_view")) {
    const auto& l = j.at("line_of_view");
    c.line_of_view.blur_sigma = l.value("blur_sigma", c.line_of_view.blur_sigma);
    c.line_of_view.floor = l.value("occlusion_attenuation", c.line_of_view.floor);
    c.lobes = l.value("lobes", c.lobes);
  }
  if (c.lobes <= 0) throw ConfigError("line_of_view.lobes must be positive");
  if (!(c.line_of_view.floor >= 0.0 && c.line_of_view.floor <= 1.0))
    throw ConfigError("occlusion_attenuation must lie in [0,1]");
  if (j.contains("obstacles")) c.obstacles = constraints::obstacles_from_json(j);
  if (j.contains("gravity")) {
    const auto& g = j.at("gravity");
    auto& out = c.gravity;
    out.enabled = g.value("enabled", false);
    if (g.contains("axis")) out.plane.axis = axis_from_json(g.at("axis"));
    out.plane.height = g.value("height", out.plane.height);
    out.plane.up = g.value("up", out.plane.up);
    out.radius = g.value("radius", out.radius);
    if (g.contains("support"))
      out.support = constraints::support_kind_from_string(g.at("support").get<std::string>());
    if (g.contains("chains")) out.chains = g.at("chains").get<std::vector<std::string>>();
    if (out.enabled && out.chains.size() != 2)
      throw ConfigError("gravity needs exactly two support chains");
  }
  return c;
}

}  // namespace

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    PipelineConfig c;
    const auto rel = std::filesystem::path(j.at("skeleton").get<std::string>());
    c.skeleton_path = rel.is_absolute() ? rel : base_dir / rel;
    c.skeleton = std::make_shared<const kinematics::SkeletonModel>(
        kinematics::load_skeleton(c.skeleton_path));
    if (j.contains("visual")) c.visual = visual::family_spec_from_json(j.at("visual"));
    c.visual.validate();
    if (j.contains("views")) {
      const auto& v = j.at("views");
      c.views.azimuths = doubles(v.value("azimuths", json::array({0.0})), "views.azimuths");
      c.views.elevations = doubles(v.value("elevations", json::array({0.0})), "views.elevations");
    }
    c.views.validate();
    if (j.contains("morph")) {
      const auto& m = j.at("morph");
      if (m.contains("width_scales"))
        c.morph.width_scales = doubles(m.at("width_scales"), "morph.width_scales");
      c.morph.min_scale = m.value("min_scale", c.morph.min_scale);
      c.morph.max_scale = m.value("max_scale", c.morph.max_scale);
      if (m.contains("per_segment"))
        for (const auto& [name, list] : m.at("per_segment").items())
          c.morph.per_segment[name] = doubles(list, "morph.per_segment");
    }
    c.morph.resolve(c.model());
    if (j.contains("constraints")) c.constraints = constraints_from_json(j.at("constraints"));
    for (const auto& name : c.constraints.gravity.chains) c.model().chain_index(name);
    for (const auto& b : c.constraints.obstacles) constraints::box_voxels(c.model().grid(), b);
    if (j.contains("msc")) c.msc = msc_from_json(j.at("msc"));
    if (j.contains("start")) {
      const auto s = j.at("start").get<std::string>();
      if (s == "canonical")
        c.start = StartMode::canonical;
      else if (s == "superposition")
        c.start = StartMode::superposition;
      else
        throw ConfigError("start must be \"canonical\" or \"superposition\"");
    }
    c.seed = j.value("seed", std::uint64_t{0});
    c.oracle_budget = j.value("oracle_budget", c.oracle_budget);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config JSON: ") + e.what(), 0, e.byte);
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace msc::pipeline
