#include "msc/kinematics/orientations.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "msc/core/errors.hpp"
#include "msc/core/grid_transforms.hpp"

namespace msc::kinematics {

std::vector<Vec3> fibonacci_cone(const Cone& cone) {
  if (cone.count <= 0) throw ConfigError("cone sample count must be positive");
  if (!(cone.half_angle_deg >= 0.0 && cone.half_angle_deg <= 180.0))
    throw ConfigError("cone half-angle must be in [0, 180]");
  const double norm = cone.axis.norm();
  if (!(norm > 0.0)) throw ConfigError("cone axis must be nonzero");
  const Vec3 w = cone.axis / norm;
  if (cone.count == 1) return {w};

  // Orthonormal frame around the axis.
  const Vec3 helper = std::abs(w.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = w.cross(helper).normalized();
  const Vec3 v = w.cross(u);

  const double cos_max = std::cos(cone.half_angle_deg * std::numbers::pi / 180.0);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(cone.count));
  for (int i = 0; i < cone.count; ++i) {
    const double cos_t = 1.0 - (1.0 - cos_max) * (i + 0.5) / cone.count;
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = golden * i;
    out.push_back((w * cos_t + sin_t * (std::cos(phi) * u + std::sin(phi) * v)).normalized());
  }
  return out;
}

std::vector<Vec3> planar_fan(const Vec3& u, const Vec3& v, int count) {
  if (count <= 0) throw ConfigError("fan count must be positive");
  const Vec3 a = u.normalized();
  const Vec3 b = (v - v.dot(a) * a).normalized();
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    out.push_back(std::cos(t) * a + std::sin(t) * b);
  }
  return out;
}

Voxel displacement_for(const Vec3& direction, double length) {
  const Vec3 target = direction.normalized() * length;
  const Voxel rounded = round_to_voxel(target);
  auto magnitude = [](Voxel p) {
    return std::sqrt(static_cast<double>(p.x * p.x + p.y * p.y + p.z * p.z));
  };
  constexpr double kSlack = 0.5 + 1e-9;
  if (std::abs(magnitude(rounded) - length) <= kSlack) return rounded;

  Voxel best = rounded;
  double best_distance = std::numeric_limits<double>::infinity();
  const int fx = static_cast<int>(std::floor(target.x()));
  const int fy = static_cast<int>(std::floor(target.y()));
  const int fz = static_cast<int>(std::floor(target.z()));
  for (int dz = -1; dz <= 2; ++dz)
    for (int dy = -1; dy <= 2; ++dy)
      for (int dx = -1; dx <= 2; ++dx) {
        const Voxel p{fx + dx, fy + dy, fz + dz};
        if (std::abs(magnitude(p) - length) > kSlack) continue;
        const double d = (Vec3(p.x, p.y, p.z) - target).norm();
        if (d < best_distance - 1e-12) {
          best = p;
          best_distance = d;
        }
      }
  if (!std::isfinite(best_distance))
    throw ConfigError("no lattice displacement matches segment length " + std::to_string(length));
  return best;
}

}  // namespace msc::kinematics
