#include <doctest.h>

#include <cmath>
#include <set>

#include "msc/constraints/gravity.hpp"
#include "msc/constraints/masks.hpp"
#include "msc/core/errors.hpp"
#include "msc/kinematics/ik.hpp"

using namespace msc;
using namespace msc::constraints;
using kinematics::Vec3;

TEST_CASE("line-of-view mask") {
  const auto grid = Space::grid3d(12, 10, 5);
  const ImagePoint joint{6, 4};

  const auto sharp = line_of_view_mask(grid, joint, {0.0, 0.0});
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 12; ++x)
        CHECK(sharp.at(grid.key(x, y, z)) == (x == 6 && y == 4 ? 1.0 : 0.0));

  const auto soft = line_of_view_mask(grid, joint, {1.0, 0.2});
  double lowest = 1.0;
  for (CellKey k = 0; k < grid.key_count(); ++k) {
    const double v = soft.at(k);
    CHECK(v >= 0.2);
    CHECK(v <= 1.0);
    lowest = std::min(lowest, v);
    const Voxel p = grid.voxel(k);
    if (p.x != 6 || p.y != 4) CHECK(v < 1.0);
    // Mirror image about the column.
    const int mx = 12 - p.x;
    if (mx >= 0 && mx < 12) CHECK(soft.at(grid.key(mx, p.y, p.z)) == v);
  }
  CHECK(lowest == 0.2);
  CHECK(soft.at(grid.key(7, 4, 2)) == doctest::Approx(0.6065306597).epsilon(1e-9));
  CHECK(soft.at(grid.key(6, 4, 3)) == 1.0);

  // Several lobes take the pointwise maximum.
  const ImagePoint lobes[] = {{2, 2}, {9, 7}};
  const auto two = line_of_view_mask(grid, lobes, {1.5, 0.2});
  const auto a = line_of_view_mask(grid, lobes[0], {1.5, 0.2});
  const auto b = line_of_view_mask(grid, lobes[1], {1.5, 0.2});
  for (CellKey k = 0; k < grid.key_count(); k += 7)
    CHECK(two.at(k) == std::max(a.at(k), b.at(k)));

  // A lobe's weight scales its profile; the floor still applies.
  const ImagePoint faint{6, 4, 0.5};
  const auto half = line_of_view_mask(grid, faint, {1.0, 0.2});
  CHECK(half.at(grid.key(6, 4, 1)) == 0.5);
  CHECK(half.at(grid.key(7, 4, 1)) == doctest::Approx(0.5 * 0.6065306597).epsilon(1e-9));
  CHECK(half.at(grid.key(0, 0, 0)) == 0.2);

  CHECK_THROWS_AS(line_of_view_mask(grid, ImagePoint{6, 4, 1.5}), ContractError);
  CHECK_THROWS_AS(line_of_view_mask(grid, ImagePoint{12, 0}), ContractError);
  CHECK_THROWS_AS(line_of_view_mask(grid, joint, {1.0, 1.5}), ConfigError);
}

TEST_CASE("obstacle mask") {
  const auto grid = Space::grid3d(6, 6, 6);
  const auto none = obstacle_mask(grid, std::span<const Voxel>{});
  CHECK(none.fill() == 1.0);
  CHECK(none.overrides().empty());

  const Voxel one[] = {{2, 3, 4}};
  const auto single = obstacle_mask(grid, one);
  int zeros = 0;
  for (CellKey k = 0; k < grid.key_count(); ++k) zeros += single.at(k) == 0.0;
  CHECK(zeros == 1);
  CHECK(single.at(grid.key(2, 3, 4)) == 0.0);

  const VoxelBox boxes[] = {{{0, 0, 0}, {1, 1, 2}}};
  const auto box = obstacle_mask(grid, boxes);
  CHECK(box.overrides().size() == 12);

  // Combining never raises a value.
  const auto los = line_of_view_mask(grid, ImagePoint{1, 1}, {1.5, 0.2});
  const auto both = los.combined(box);
  for (CellKey k = 0; k < grid.key_count(); ++k) {
    CHECK(both.at(k) <= los.at(k));
    CHECK(both.at(k) <= box.at(k));
  }

  const auto loaded = load_obstacles(MSC_TEST_DATA "/wall_obstacle.json");
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].lo == Voxel{9, 7, 0});
  CHECK_THROWS_AS(obstacles_from_json(nlohmann::json::parse(R"({"boxes":[{"lo":[1,2]}]})")),
                  ConfigError);
}

TEST_CASE("IK around a wall matches the filtered oracle") {
  const auto model = kinematics::load_skeleton(MSC_TEST_DATA "/wall_arm.json");
  const auto& grid = model.grid();
  const auto boxes = load_obstacles(MSC_TEST_DATA "/wall_obstacle.json");
  const auto wall_voxels = box_voxels(grid, boxes[0]);
  const std::set<Voxel> wall(wall_voxels.begin(), wall_voxels.end());
  const Voxel target{18, 12, 1};

  // Filtered oracle: every composition, discarding any that leaves the grid
  // or puts a joint inside the wall.
  const auto& d0 = model.segment(0).displacements;
  const auto& d1 = model.segment(1).displacements;
  const auto& d2 = model.segment(2).displacements;
  std::vector<std::vector<int>> reaching_free, reaching_any;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int k = 0; k < 16; ++k) {
        const Voxel a = model.root() + d0[std::size_t(i)];
        const Voxel b = a + d1[std::size_t(j)];
        const Voxel c = b + d2[std::size_t(k)];
        if (!grid.contains(a) || !grid.contains(b) || c != target) continue;
        reaching_any.push_back({i, j, k});
        if (!wall.contains(a) && !wall.contains(b)) reaching_free.push_back({i, j, k});
      }
  REQUIRE(reaching_free.size() == 1);
  REQUIRE(reaching_any.size() > 1);

  const auto mask = obstacle_mask(grid, boxes);
  const auto root = Field::impulse(grid, grid.key(model.root()));
  const auto goal = Field::impulse(grid, grid.key(target));
  const auto blocked = kinematics::solve_ik(model, 0, root, goal, {mask, mask, mask});
  REQUIRE(blocked.status == CircuitStatus::converged);
  CHECK(blocked.pose->indices == reaching_free.front());
  for (const auto& v : blocked.pose->distal) CHECK_FALSE(wall.contains(v));
  CHECK(blocked.max_applications <= blocked.application_bound);

  const auto open = kinematics::solve_ik(model, 0, root, goal);
  REQUIRE(open.status == CircuitStatus::converged);
  CHECK(open.pose->distal.back() == target);
  CHECK(open.pose->indices != blocked.pose->indices);
}

TEST_CASE("gravity support region") {
  const auto grid = Space::grid3d(21, 21, 6);
  const GroundPlane floor_z{2, 0, 1};
  const Vec3 left(5, 10, 0), right(15, 10, 0);

  const auto ok = gravity_support_mask(grid, Vec3(10, 10, 4), left, right, floor_z, 1.0);
  CHECK_FALSE(ok.statically_unstable);
  CHECK(ok.com_offset == 0.0);
  CHECK(ok.mask.at(grid.key(10, 10, 0)) == 1.0);
  CHECK(ok.mask.at(grid.key(10, 11, 0)) == 1.0);
  CHECK(ok.mask.at(grid.key(10, 12, 0)) == 0.0);
  CHECK(ok.mask.at(grid.key(10, 10, 1)) == 0.0);
  CHECK(ok.mask.at(grid.key(4, 10, 0)) == 1.0);
  CHECK(ok.mask.at(grid.key(3, 10, 0)) == 0.0);

  const auto tipping = gravity_support_mask(grid, Vec3(100, 10, 4), left, right, floor_z, 1.0);
  CHECK(tipping.statically_unstable);
  REQUIRE(tipping.diagnostic);
  CHECK(tipping.diagnostic->starts_with("statically-unstable"));

  const auto disc = gravity_support_mask(grid, Vec3(8, 8, 3), Vec3(8, 8, 0), Vec3(8, 8, 0),
                                         floor_z, 2.0);
  CHECK(disc.mask.overrides().size() == 13);

  // Image-style ground: rows grow downward, so up is -y.
  const auto grid_y = Space::grid3d(10, 10, 10);
  const GroundPlane floor_y{1, 8, -1};
  const auto band = gravity_support_mask(grid_y, Vec3(5, 3, 5), Vec3(2, 8, 5), Vec3(7, 8, 5),
                                         floor_y, 0.5);
  CHECK(band.mask.overrides().size() == 6);
  CHECK(band.mask.at(grid_y.key(4, 8, 5)) == 1.0);
  CHECK_THROWS_AS(gravity_support_mask(grid_y, Vec3(5, 3, 5), Vec3(2, 9, 5), Vec3(7, 8, 5),
                                       floor_y, 0.5),
                  ContractError);
}

TEST_CASE("ball support shifts the ankle band back") {
  auto model = kinematics::load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto& grid = model.grid();
  const GroundPlane ground{1, 26, -1};
  const auto region = gravity_support_mask(grid, Vec3(16, 15, 16), Vec3(12, 26, 16),
                                           Vec3(20, 26, 16), ground, 1.0);
  const auto heels = ankle_mask_for(model, region.mask, SupportKind::heels);
  const auto balls = ankle_mask_for(model, region.mask, SupportKind::balls);
  CHECK(heels.at(grid.key(16, 26, 16)) == 1.0);
  CHECK(balls.at(grid.key(16, 26, 16)) == 0.0);
  CHECK(balls.at(grid.key(16, 26, 14)) == 1.0);
  CHECK(support_point(model, {16, 26, 14}, SupportKind::balls).isApprox(Vec3(16, 26, 16)));
  CHECK(support_kind_from_string("balls") == SupportKind::balls);
  CHECK_THROWS_AS(support_kind_from_string("toes"), ConfigError);
}

TEST_CASE("centre of mass") {
  using kinematics::SegmentSpec;
  auto seg = [](std::string name, std::string parent, Vec3 dir, double mass) {
    SegmentSpec s;
    s.name = std::move(name);
    s.parent = std::move(parent);
    s.length = 4;
    s.orientations = {dir};
    s.mass_fraction = mass;
    return s;
  };
  const auto grid = Space::grid3d(20, 20, 20);
  const kinematics::SkeletonModel one(grid, {5, 5, 5}, {seg("a", "root", Vec3::UnitX(), 1.0)},
                                      {{"c", {0}, -1}});
  const int zero[] = {0, 0};
  CHECK(estimate_center_of_mass(kinematics::forward_kinematics(one, std::span(zero, 1)), one)
            .isApprox(Vec3(7, 5, 5)));

  const kinematics::SkeletonModel two(
      grid, {5, 5, 5}, {seg("a", "root", Vec3::UnitX(), 0.5), seg("b", "a", Vec3::UnitX(), 0.5)},
      {{"c", {0, 1}, -1}});
  CHECK(estimate_center_of_mass(kinematics::forward_kinematics(two, zero), two)
            .isApprox(Vec3(9, 5, 5)));

  const auto toy = kinematics::load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const std::vector<int> idx = {3, 1, 6, 4, 2};
  const auto pose = kinematics::forward_kinematics(toy, idx);
  Vec3 expected = Vec3::Zero();
  double total = 0;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const double m = *toy.segment(s).mass_fraction;
    const auto& p = pose.proximal[s];
    const auto& d = pose.distal[s];
    expected += m * Vec3((p.x + d.x) / 2.0, (p.y + d.y) / 2.0, (p.z + d.z) / 2.0);
    total += m;
  }
  expected /= total;
  CHECK((estimate_center_of_mass(pose, toy) - expected).norm() < 1e-9);

  auto bare = seg("a", "root", Vec3::UnitX(), 1.0);
  bare.mass_fraction.reset();
  const kinematics::SkeletonModel massless(grid, {5, 5, 5}, {bare}, {{"c", {0}, -1}});
  CHECK_THROWS_AS(
      estimate_center_of_mass(kinematics::forward_kinematics(massless, std::span(zero, 1)), massless),
      ConfigError);
}

TEST_CASE("line-of-view mask through a view rotation") {
  const auto grid = Space::grid3d(16, 16, 16);
  const ImagePoint lobe[] = {{11, 5}};
  const LineOfViewParams params{1.0, 0.1};
  CHECK(line_of_view_mask_for_view(grid, lobe, Eigen::Matrix3d::Identity(), params).overrides().size() ==
        line_of_view_mask(grid, lobe, params).overrides().size());

  // A quarter turn in azimuth sends body +z to view +x, so the view-frame
  // column at x = 11 is the body-frame row at z = 11, running along x.
  Eigen::Matrix3d quarter;
  quarter << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  const auto m = line_of_view_mask_for_view(grid, lobe, quarter, params);
  for (int x = 0; x < 16; ++x) CHECK(m.at(grid.key(x, 5, 11)) == 1.0);
  CHECK(m.at(grid.key(11, 5, 8)) < 1.0);
}
