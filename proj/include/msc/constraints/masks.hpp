#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "msc/core/mask.hpp"

namespace msc::constraints {

struct ImagePoint {
  int x = 0;
  int y = 0;
  // Peak of this lobe's column; a secondary lobe can be weaker than 1.
  double weight = 1.0;

  friend bool operator==(const ImagePoint&, const ImagePoint&) = default;
};

struct LineOfViewParams {
  double blur_sigma = 1.5;
  // Value kept away from every lobe, so occluded joints are only inhibited.
  double floor = 0.2;
};

// Depth columns through the given image positions, blurred transversely with
// a Gaussian and clamped below at the floor. Several lobes combine by taking
// the largest value at each voxel.
MaskField line_of_view_mask(const Space& grid, std::span<const ImagePoint> lobes,
                            const LineOfViewParams& params = {});
MaskField line_of_view_mask(const Space& grid, ImagePoint joint,
                            const LineOfViewParams& params = {});
// Lobes given in the frame of a view: a body voxel v is measured at
// view * (v - c) + c, c the grid centre, so the columns run along the
// viewing direction.
MaskField line_of_view_mask_for_view(const Space& grid, std::span<const ImagePoint> lobes,
                                     const Eigen::Matrix3d& view, const LineOfViewParams& params = {});

// Inclusive voxel box.
struct VoxelBox {
  Voxel lo;
  Voxel hi;
};

// Zero on the listed voxels, one elsewhere.
MaskField obstacle_mask(const Space& grid, std::span<const Voxel> obstacles);
MaskField obstacle_mask(const Space& grid, std::span<const VoxelBox> boxes);
std::vector<Voxel> box_voxels(const Space& grid, const VoxelBox& box);

// {"boxes":[{"lo":[x,y,z],"hi":[x,y,z]}, ...]}
std::vector<VoxelBox> obstacles_from_json(const nlohmann::json& j);
std::vector<VoxelBox> load_obstacles(const std::filesystem::path& path);

}  // namespace msc::constraints
