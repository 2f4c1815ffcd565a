#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "msc/constraints/gravity.hpp"
#include "msc/constraints/masks.hpp"
#include "msc/core/circuit.hpp"
#include "msc/kinematics/skeleton.hpp"
#include "msc/morph/view.hpp"
#include "msc/visual/families.hpp"

namespace msc::pipeline {

struct StageRates {
  double shift = 0.1;
  double scale = 0.1;
  double rotation = 0.1;
  double morph = 0.1;
  double view = 0.1;
  double kinematic = 0.1;
};

struct MscSettings {
  StageRates rates;
  GainRule gain_rule;
  int max_iterations = 200;
  int stall_window = 10;
  AggregationPolicy aggregation;

  CircuitParams circuit_params() const;
};

struct MorphSettings {
  std::vector<double> width_scales{1.0};
  double min_scale = 0.5;
  double max_scale = 2.0;
  // Overrides of `width_scales` by segment name.
  std::map<std::string, std::vector<double>> per_segment;

  // One list per segment in model order. Throws ConfigError for scales
  // outside [min_scale, max_scale], empty or duplicated lists, unknown names.
  std::vector<std::vector<double>> resolve(const kinematics::SkeletonModel& model) const;
};

struct GravitySettings {
  bool enabled = false;
  constraints::GroundPlane plane;
  double radius = 1.0;
  constraints::SupportKind support = constraints::SupportKind::heels;
  // Chains whose end joints are the ankles.
  std::vector<std::string> chains;
};

struct ConstraintSettings {
  constraints::LineOfViewParams line_of_view;
  int lobes = 3;
  std::vector<constraints::VoxelBox> obstacles;
  GravitySettings gravity;
};

// Model side of the visual circuit before any kinematic feedback.
enum class StartMode { canonical, superposition };

struct PipelineConfig {
  std::filesystem::path skeleton_path;
  std::shared_ptr<const kinematics::SkeletonModel> skeleton;
  visual::VisualFamilySpec visual;
  morph::ViewFamilySpec views;
  MorphSettings morph;
  ConstraintSettings constraints;
  MscSettings msc;
  StartMode start = StartMode::canonical;
  std::uint64_t seed = 0;
  double oracle_budget = 1e7;

  const kinematics::SkeletonModel& model() const { return *skeleton; }
  Space image_space() const;
};

// Relative skeleton paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace msc::pipeline
