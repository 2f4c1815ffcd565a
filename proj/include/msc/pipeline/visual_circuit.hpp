#pragma once

#include <random>
#include <vector>

#include "msc/core/circuit.hpp"
#include "msc/pipeline/config.hpp"

namespace msc::pipeline {

// One point of the full search space: every visual parameter, a morph
// variant per segment and an orientation per segment.
struct PlantSpec {
  visual::VisualIndices visual;
  std::size_t view = 0;
  std::vector<int> variants;
  std::vector<int> pose;

  friend bool operator==(const PlantSpec&, const PlantSpec&) = default;
};

// The five-stage visual circuit: shift, scale, in-plane rotation (on the
// image), morph (image to view-frame segment pairs) and view rotation
// (view-frame to body-frame pairs).
class VisualSearch {
 public:
  explicit VisualSearch(const PipelineConfig& config);

  static constexpr std::size_t shift_stage = 0;
  static constexpr std::size_t scale_stage = 1;
  static constexpr std::size_t rotation_stage = 2;
  static constexpr std::size_t morph_stage = 3;
  static constexpr std::size_t view_stage = 4;

  const Space& image() const noexcept { return image_; }
  const Space& pairs() const noexcept { return pairs_; }
  const kinematics::SkeletonModel& model() const noexcept { return *model_; }
  const visual::VisualFamilies& planar() const noexcept { return planar_; }
  const TransformFamily& morph() const noexcept { return morph_; }
  const TransformFamily& view() const noexcept { return view_; }
  const std::vector<morph::ViewAngles>& views() const noexcept { return views_; }
  const std::vector<std::vector<double>>& widths() const noexcept { return widths_; }
  const PipelineConfig& config() const noexcept { return *config_; }

  std::size_t morph_member(int segment, int variant) const;
  int variant_of(std::size_t member) const;

  std::vector<Stage> stages() const;
  Circuit circuit(Field input, Field top) const;
  std::vector<std::size_t> family_sizes() const;

  // Circuit composition of a plant (one entry per competition group).
  Composition composition_of(const PlantSpec& plant) const;
  // Visual and morph parts of a composition; the pose is left empty.
  PlantSpec plant_of(const Composition& composition) const;

 private:
  const PipelineConfig* config_;
  const kinematics::SkeletonModel* model_;
  Space image_;
  Space pairs_;
  visual::VisualFamilies planar_;
  TransformFamily morph_;
  TransformFamily view_;
  std::vector<morph::ViewAngles> views_;
  std::vector<std::vector<double>> widths_;
  std::vector<std::size_t> morph_offset_;
};

// One unit-weight key per segment hypothesis of a pose.
Field pose_keys(const Space& pairs, const kinematics::PoseSolution& pose);

// Image of a plant: the pose keys pushed through the selected members'
// adjoints, top to bottom.
Field render_plant(const VisualSearch& search, const PlantSpec& plant);

// The same image built without the circuit: endpoints rotated into the view,
// outlines drawn per segment and summed, then placed by the 2D members.
Field render_direct(const VisualSearch& search, const PlantSpec& plant);

// Uniformly random plant whose pose stays inside the grid in every view.
PlantSpec random_plant(const VisualSearch& search, std::mt19937_64& rng);

}  // namespace msc::pipeline
