#pragma once

#include <optional>
#include <string>

#include "msc/core/mask.hpp"
#include "msc/kinematics/skeleton.hpp"

namespace msc::constraints {

// A horizontal ground plane: voxels whose coordinate along `axis` equals
// `height`. `up` is +1 or -1, the sign of the upward direction on that axis
// (image rows grow downward, so a y ground uses -1).
struct GroundPlane {
  int axis = 1;
  int height = 0;
  int up = -1;
};

struct SupportRegion {
  MaskField mask;
  // In-plane distance from the projected centre of mass to the support segment.
  double com_offset = 0.0;
  bool statically_unstable = false;
  std::optional<std::string> diagnostic;
};

// Ones within `radius` of the in-plane segment between the two support
// points, on the ground plane only. The projected centre of mass must fall
// in the same band, otherwise the pose is flagged statically unstable.
// Coincident supports give a disc.
SupportRegion gravity_support_mask(const Space& grid, const kinematics::Vec3& com,
                                   const kinematics::Vec3& support_a,
                                   const kinematics::Vec3& support_b, const GroundPlane& plane,
                                   double radius);

// Mass-weighted mean of segment midpoints. Throws ConfigError when a segment
// has no mass fraction.
kinematics::Vec3 estimate_center_of_mass(const kinematics::PoseSolution& pose,
                                         const kinematics::SkeletonModel& model);

enum class SupportKind { heels, balls };

SupportKind support_kind_from_string(const std::string& s);
std::string to_string(SupportKind kind);

// Where a foot bears weight given its ankle locus: the ankle itself, or the
// ball of the foot one foot length ahead along the model's forward direction.
kinematics::Vec3 support_point(const kinematics::SkeletonModel& model, const Voxel& ankle,
                               SupportKind kind);

// Converts a mask over support points into one over ankle loci.
MaskField ankle_mask_for(const kinematics::SkeletonModel& model, const MaskField& support,
                         SupportKind kind);

}  // namespace msc::constraints
