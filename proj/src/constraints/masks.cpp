#include "msc/constraints/masks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "msc/core/errors.hpp"

namespace msc::constraints {

namespace {

void check_lobes(const Space& grid, std::span<const ImagePoint> lobes,
                 const LineOfViewParams& params) {
  if (grid.kind() != SpaceKind::grid3d) throw ContractError("line-of-view mask needs a 3D grid");
  if (!(params.blur_sigma >= 0.0)) throw ConfigError("blur_sigma must be non-negative");
  if (!(params.floor >= 0.0 && params.floor <= 1.0))
    throw ConfigError("line-of-view floor must lie in [0,1]");
  for (const auto& p : lobes) {
    if (!grid.contains(p.x, p.y, 0)) throw ContractError("line-of-view joint outside the image");
    if (!(p.weight >= 0.0 && p.weight <= 1.0)) throw ContractError("lobe weight must lie in [0,1]");
  }
}

double lobe_value(double dx, double dy, const LineOfViewParams& params) {
  const double d2 = dx * dx + dy * dy;
  if (d2 == 0.0) return 1.0;
  if (params.blur_sigma > 0.0)
    return std::exp(-0.5 * d2 / (params.blur_sigma * params.blur_sigma));
  return 0.0;
}

double lobe_value(const ImagePoint& p, double x, double y, const LineOfViewParams& params) {
  return p.weight * lobe_value(x - p.x, y - p.y, params);
}

}  // namespace

MaskField line_of_view_mask(const Space& grid, std::span<const ImagePoint> lobes,
                            const LineOfViewParams& params) {
  check_lobes(grid, lobes, params);

  // Transverse profile over the image plane, shared by every depth slice.
  const auto nx = static_cast<std::size_t>(grid.nx());
  const auto ny = static_cast<std::size_t>(grid.ny());
  std::vector<double> plane(nx * ny, params.floor);
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x) {
      double best = params.floor;
      for (const auto& p : lobes)
        best = std::max(best, lobe_value(p, static_cast<double>(x), static_cast<double>(y), params));
      plane[y * nx + x] = best;
    }

  std::vector<Entry> overrides;
  for (int z = 0; z < grid.nz(); ++z)
    for (std::size_t i = 0; i < plane.size(); ++i)
      if (plane[i] != params.floor)
        overrides.push_back({grid.key(static_cast<int>(i % nx), static_cast<int>(i / nx), z),
                             plane[i]});
  return MaskField::from_values(grid, params.floor, std::move(overrides));
}

MaskField line_of_view_mask_for_view(const Space& grid, std::span<const ImagePoint> lobes,
                                     const Eigen::Matrix3d& view, const LineOfViewParams& params) {
  if (view.isIdentity(0.0)) return line_of_view_mask(grid, lobes, params);
  check_lobes(grid, lobes, params);
  const Eigen::Vector3d c(grid.nx() / 2, grid.ny() / 2, grid.nz() / 2);
  // Squared distance beyond which a lobe cannot rise above the floor.
  std::vector<double> reach;
  for (const auto& p : lobes) {
    if (p.weight <= params.floor)
      reach.push_back(-1.0);
    else if (params.floor > 0.0 && params.blur_sigma > 0.0)
      reach.push_back(2.0 * params.blur_sigma * params.blur_sigma * std::log(p.weight / params.floor) + 1e-9);
    else
      reach.push_back(params.blur_sigma > 0.0 ? INFINITY : 0.0);
  }
  std::vector<Entry> overrides;
  const Eigen::Vector3d step = view.col(0);
  const double step2 = step.x() * step.x() + step.y() * step.y();
  std::vector<char> candidate(static_cast<std::size_t>(grid.nx()));
  for (int z = 0; z < grid.nz(); ++z)
    for (int y = 0; y < grid.ny(); ++y) {
      // Along a row the image position moves linearly with x, so each lobe
      // reaches an interval of x; mark it, one voxel wider for rounding.
      std::fill(candidate.begin(), candidate.end(), 0);
      const Eigen::Vector3d base = view * (Eigen::Vector3d(0, y, z) - c) + c;
      for (std::size_t i = 0; i < lobes.size(); ++i) {
        if (reach[i] < 0.0) continue;
        int lo = 0, hi = grid.nx() - 1;
        const double ax = base.x() - lobes[i].x, ay = base.y() - lobes[i].y;
        if (std::isfinite(reach[i]) && step2 > 1e-12) {
          const double b = ax * step.x() + ay * step.y();
          const double disc = b * b - step2 * (ax * ax + ay * ay - reach[i]);
          if (disc < 0.0) continue;
          const double root = std::sqrt(disc);
          lo = std::max(lo, static_cast<int>(std::floor((-b - root) / step2)) - 1);
          hi = std::min(hi, static_cast<int>(std::ceil((-b + root) / step2)) + 1);
        }
        for (int x = lo; x <= hi; ++x) candidate[static_cast<std::size_t>(x)] = 1;
      }
      for (int x = 0; x < grid.nx(); ++x) {
        if (!candidate[static_cast<std::size_t>(x)]) continue;
        const Eigen::Vector3d u = view * (Eigen::Vector3d(x, y, z) - c) + c;
        double best = params.floor;
        for (std::size_t i = 0; i < lobes.size(); ++i) {
          const double dx = u.x() - lobes[i].x;
          const double dy = u.y() - lobes[i].y;
          if (dx * dx + dy * dy > reach[i]) continue;
          best = std::max(best, lobe_value(lobes[i], u.x(), u.y(), params));
        }
        if (best != params.floor) overrides.push_back({grid.key(x, y, z), best});
      }
    }
  return MaskField::from_values(grid, params.floor, std::move(overrides));
}

MaskField line_of_view_mask(const Space& grid, ImagePoint joint, const LineOfViewParams& params) {
  return line_of_view_mask(grid, std::span<const ImagePoint>(&joint, 1), params);
}

MaskField obstacle_mask(const Space& grid, std::span<const Voxel> obstacles) {
  if (!grid.is_grid()) throw ContractError("obstacle mask needs a grid space");
  std::vector<Entry> zeros;
  zeros.reserve(obstacles.size());
  for (const auto& v : obstacles) {
    if (!grid.contains(v)) throw ContractError("obstacle voxel outside the grid");
    zeros.push_back({grid.key(v), 0.0});
  }
  return MaskField::from_values(grid, 1.0, std::move(zeros));
}

std::vector<Voxel> box_voxels(const Space& grid, const VoxelBox& box) {
  if (!grid.contains(box.lo) || !grid.contains(box.hi))
    throw ContractError("obstacle box outside the grid");
  if (box.lo.x > box.hi.x || box.lo.y > box.hi.y || box.lo.z > box.hi.z)
    throw ContractError("obstacle box corners out of order");
  std::vector<Voxel> out;
  for (int z = box.lo.z; z <= box.hi.z; ++z)
    for (int y = box.lo.y; y <= box.hi.y; ++y)
      for (int x = box.lo.x; x <= box.hi.x; ++x) out.push_back({x, y, z});
  return out;
}

MaskField obstacle_mask(const Space& grid, std::span<const VoxelBox> boxes) {
  std::vector<Voxel> all;
  for (const auto& b : boxes) {
    const auto v = box_voxels(grid, b);
    all.insert(all.end(), v.begin(), v.end());
  }
  return obstacle_mask(grid, all);
}

std::vector<VoxelBox> obstacles_from_json(const nlohmann::json& j) {
  auto corner = [](const nlohmann::json& c) {
    if (!c.is_array() || c.size() != 3) throw ConfigError("obstacle corner must be [x,y,z]");
    return Voxel{c[0].get<int>(), c[1].get<int>(), c[2].get<int>()};
  };
  try {
    std::vector<VoxelBox> out;
    for (const auto& b : j.at("boxes")) out.push_back({corner(b.at("lo")), corner(b.at("hi"))});
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("obstacles: ") + e.what());
  }
}

std::vector<VoxelBox> load_obstacles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open obstacle file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("obstacle JSON: ") + e.what(), 0, e.byte);
  }
  return obstacles_from_json(j);
}

}  // namespace msc::constraints
