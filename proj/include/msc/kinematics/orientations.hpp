#pragma once

#include <vector>

#include <Eigen/Core>

#include "msc/core/space.hpp"

namespace msc::kinematics {

using Vec3 = Eigen::Vector3d;

struct Cone {
  Vec3 axis = Vec3::UnitY();
  double half_angle_deg = 0.0;
  int count = 1;
};

// Deterministic spherical-Fibonacci sampling of a cone's cap. A single
// sample is the axis itself.
std::vector<Vec3> fibonacci_cone(const Cone& cone);

// `count` directions evenly spaced around the unit circle spanned by `u` and `v`,
// starting at `u`.
std::vector<Vec3> planar_fan(const Vec3& u, const Vec3& v, int count);

// Integer displacement for a segment of `length` along `direction`. Rounds
// each axis to nearest; if that lands more than half a voxel away from the
// segment length, takes the closest neighbouring lattice point that does not.
Voxel displacement_for(const Vec3& direction, double length);

}  // namespace msc::kinematics
