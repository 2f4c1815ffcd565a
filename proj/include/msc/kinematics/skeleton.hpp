#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "msc/core/transform.hpp"
#include "msc/kinematics/orientations.hpp"

namespace msc::kinematics {

struct SegmentSpec {
  std::string name;
  double length = 0.0;
  // "root" or the name of the segment whose distal joint this one hangs from.
  std::string parent = "root";
  std::vector<Vec3> orientations;
  std::vector<Voxel> displacements;
  // Capsule half-width used when the segment is rendered.
  double base_width = 1.0;
  std::optional<double> mass_fraction;
};

struct ChainSpec {
  std::string name;
  std::vector<int> segments;
  // Chain whose end joint this chain starts from; -1 for the root.
  int upstream = -1;
};

// Segments grouped into chains that form a forest hanging from the root.
class SkeletonModel {
 public:
  SkeletonModel(Space grid, Voxel root, std::vector<SegmentSpec> segments,
                std::vector<ChainSpec> chains);

  const Space& grid() const noexcept { return grid_; }
  Voxel root() const noexcept { return root_; }
  std::span<const SegmentSpec> segments() const noexcept { return segments_; }
  std::span<const ChainSpec> chains() const noexcept { return chains_; }
  const SegmentSpec& segment(std::size_t i) const { return segments_.at(i); }
  const ChainSpec& chain(std::size_t i) const { return chains_.at(i); }

  int segment_index(const std::string& name) const;
  int chain_index(const std::string& name) const;
  // Chain containing the segment, and its position within that chain.
  std::pair<int, int> chain_of(int segment) const;
  // Parent segment index, or -1 for the root.
  int parent_of(int segment) const { return parents_.at(static_cast<std::size_t>(segment)); }
  // Chains ordered so that every chain follows its upstream chain.
  const std::vector<int>& chain_order() const noexcept { return order_; }
  // Chains starting at the end joint of `chain`.
  std::vector<int> downstream_of(int chain) const;

  // Unit direction the body faces (used to place the balls of the feet).
  Vec3 forward = Vec3::UnitZ();
  double foot_length = 0.0;

  std::size_t total_orientations() const noexcept;

 private:
  Space grid_;
  Voxel root_;
  std::vector<SegmentSpec> segments_;
  std::vector<ChainSpec> chains_;
  std::vector<int> parents_;
  std::vector<int> order_;
};

// Loads the JSON skeleton format:
// {"grid":[X,Y,Z], "root":[x,y,z], "forward":[..], "foot_length":f,
//  "segments":[{"name","length","parent","base_width","mass_fraction",
//               "cone":{"axis":[..],"half_angle_deg":a,"count":n}
//               | "fan":{"u":[..],"v":[..],"count":n} | "orientations":[[..],..]}],
//  "chains":[{"name","segments":[..]}]}
SkeletonModel skeleton_from_json(const nlohmann::json& j);
SkeletonModel load_skeleton(const std::filesystem::path& path);

struct PoseSolution {
  // Orientation index per segment, in model order.
  std::vector<int> indices;
  std::vector<Voxel> proximal;
  std::vector<Voxel> distal;
  bool degenerate = false;
};

// Joint loci by composing displacements from the root. Throws
// OutOfBoundsError naming the first segment that leaves the grid.
PoseSolution forward_kinematics(const SkeletonModel& model, std::span<const int> indices);

// Orientation index per segment closest to the mean direction of its set
// (the cone axis for cone samples; index 0 when the set is balanced).
std::vector<int> canonical_indices(const SkeletonModel& model);

// Member j moves every voxel by the segment's j-th displacement.
TransformFamily make_lambda_family(const Space& grid, const SegmentSpec& segment);

}  // namespace msc::kinematics
