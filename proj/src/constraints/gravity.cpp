#include "msc/constraints/gravity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "msc/core/errors.hpp"
#include "msc/core/grid_transforms.hpp"

namespace msc::constraints {

using kinematics::Vec3;

namespace {

// The two in-plane axes of a ground plane.
std::array<int, 2> plane_axes(int axis) {
  switch (axis) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    case 2: return {0, 1};
    default: throw ConfigError("ground axis must be 0, 1 or 2");
  }
}

double distance_to_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double ux = bx - ax;
  const double uy = by - ay;
  const double len2 = ux * ux + uy * uy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - ax) * ux + (py - ay) * uy) / len2, 0.0, 1.0);
  return std::hypot(px - ax - t * ux, py - ay - t * uy);
}

}  // namespace

SupportRegion gravity_support_mask(const Space& grid, const Vec3& com, const Vec3& support_a,
                                   const Vec3& support_b, const GroundPlane& plane,
                                   double radius) {
  if (grid.kind() != SpaceKind::grid3d) throw ContractError("gravity mask needs a 3D grid");
  if (plane.up != 1 && plane.up != -1) throw ConfigError("ground 'up' must be +1 or -1");
  if (!(radius >= 0.0)) throw ConfigError("support radius must be non-negative");
  const auto [u, v] = plane_axes(plane.axis);
  for (const Vec3* p : {&support_a, &support_b})
    if (((*p)[plane.axis] - plane.height) * plane.up < -1e-9)
      throw ContractError("support point below the ground plane");

  const int dims[3] = {grid.nx(), grid.ny(), grid.nz()};
  if (plane.height < 0 || plane.height >= dims[plane.axis])
    throw ContractError("ground plane outside the grid");

  std::vector<Entry> ones;
  for (int i = 0; i < dims[u]; ++i)
    for (int j = 0; j < dims[v]; ++j) {
      const double d = distance_to_segment(i, j, support_a[u], support_a[v], support_b[u],
                                           support_b[v]);
      if (d > radius + 1e-9) continue;
      int c[3];
      c[plane.axis] = plane.height;
      c[u] = i;
      c[v] = j;
      ones.push_back({grid.key(c[0], c[1], c[2]), 1.0});
    }

  SupportRegion out{MaskField::from_values(grid, 0.0, std::move(ones)), 0.0, false, std::nullopt};
  out.com_offset =
      distance_to_segment(com[u], com[v], support_a[u], support_a[v], support_b[u], support_b[v]);
  if (out.com_offset > radius + 1e-9) {
    out.statically_unstable = true;
    std::ostringstream msg;
    msg << "statically-unstable: centre of mass projects " << out.com_offset
        << " voxels from the support segment (radius " << radius << ")";
    out.diagnostic = msg.str();
  }
  return out;
}

Vec3 estimate_center_of_mass(const kinematics::PoseSolution& pose,
                             const kinematics::SkeletonModel& model) {
  const auto segments = model.segments();
  if (pose.proximal.size() != segments.size() || pose.distal.size() != segments.size())
    throw ContractError("centre of mass needs a complete pose");
  Vec3 sum = Vec3::Zero();
  double mass = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!segments[s].mass_fraction)
      throw ConfigError("segment '" + segments[s].name + "' has no mass_fraction");
    const double m = *segments[s].mass_fraction;
    const Vec3 a(pose.proximal[s].x, pose.proximal[s].y, pose.proximal[s].z);
    const Vec3 b(pose.distal[s].x, pose.distal[s].y, pose.distal[s].z);
    sum += m * 0.5 * (a + b);
    mass += m;
  }
  if (!(mass > 0.0)) throw ConfigError("mass fractions sum to zero");
  return sum / mass;
}

SupportKind support_kind_from_string(const std::string& s) {
  if (s == "heels") return SupportKind::heels;
  if (s == "balls") return SupportKind::balls;
  throw ConfigError("gravity support must be 'heels' or 'balls', got '" + s + "'");
}

std::string to_string(SupportKind kind) { return kind == SupportKind::heels ? "heels" : "balls"; }

namespace {

Voxel ball_offset(const kinematics::SkeletonModel& model) {
  return round_to_voxel(model.foot_length * model.forward);
}

}  // namespace

Vec3 support_point(const kinematics::SkeletonModel& model, const Voxel& ankle, SupportKind kind) {
  const Vec3 a(ankle.x, ankle.y, ankle.z);
  if (kind == SupportKind::heels) return a;
  const Voxel o = ball_offset(model);
  return a + Vec3(o.x, o.y, o.z);
}

MaskField ankle_mask_for(const kinematics::SkeletonModel& model, const MaskField& support,
                         SupportKind kind) {
  if (kind == SupportKind::heels) return support;
  if (support.fill() != 0.0) throw ContractError("ankle_mask_for expects a zero-fill region");
  const Space& grid = support.space();
  const Voxel o = ball_offset(model);
  std::vector<Entry> moved;
  for (const auto& e : support.overrides()) {
    const Voxel ankle = grid.voxel(e.key) - o;
    if (grid.contains(ankle)) moved.push_back({grid.key(ankle), e.weight});
  }
  return MaskField::from_values(grid, 0.0, std::move(moved));
}

}  // namespace msc::constraints
