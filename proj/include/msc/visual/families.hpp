#pragma once

#include <compare>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "msc/core/grid_transforms.hpp"
#include "msc/core/stage.hpp"

namespace msc::visual {

struct Offset2 {
  int dx = 0;
  int dy = 0;

  friend auto operator<=>(const Offset2&, const Offset2&) = default;
};

// Discretization of the 2D similarity group searched by a visual circuit.
struct VisualFamilySpec {
  std::vector<Offset2> shifts{{0, 0}};
  std::vector<double> scales{1.0};
  std::vector<double> rotations_deg{0.0};
  // Rotation and scaling centre in cells; the grid centre cell when unset.
  std::optional<Eigen::Vector2d> center;
  // How scale and rotation members treat cells that collide.
  Resampling resampling = Resampling::sum;

  // Throws ConfigError: empty lists, duplicate shifts, non-monotone ladders,
  // missing identity members, non-positive scales.
  void validate() const;

  std::size_t identity_shift() const;
  std::size_t identity_scale() const;
  std::size_t identity_rotation() const;
};

// Every offset in [x0,x1] x [y0,y1], dy-major.
std::vector<Offset2> shift_window(int x0, int x1, int y0, int y1);
// step^k for k in [-below, above].
std::vector<double> geometric_ladder(double step, int below, int above);
// k*step for k in [-below, above].
std::vector<double> uniform_angles(double step_deg, int below, int above);

TransformFamily make_shift_family(const Space& space, const VisualFamilySpec& spec);
TransformFamily make_scale_family(const Space& space, const VisualFamilySpec& spec);
TransformFamily make_rot2d_family(const Space& space, const VisualFamilySpec& spec);

struct VisualIndices {
  std::size_t shift = 0;
  std::size_t scale = 0;
  std::size_t rotation = 0;

  friend bool operator==(const VisualIndices&, const VisualIndices&) = default;
};

struct VisualFamilies {
  TransformFamily shift;
  TransformFamily scale;
  TransformFamily rotation;

  static VisualFamilies build(const Space& space, const VisualFamilySpec& spec);
};

// Stages in forward (image to template) order: shift, scale, rotation.
std::vector<Stage> make_visual_stages(const VisualFamilies& families, double rate = 0.1);

// JSON form: {"shifts": [[dx,dy],...] | {"dx":[lo,hi],"dy":[lo,hi]},
//             "scales": [...], "rotations_deg": [...], "center": [x,y],
//             "resampling": "sum" | "balanced"}
VisualFamilySpec family_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const VisualFamilySpec& spec);

}  // namespace msc::visual
