#include <doctest.h>

#include <map>
#include <random>

#include "msc/core/errors.hpp"
#include "msc/kinematics/ik.hpp"
#include "msc/kinematics/skeleton.hpp"

using namespace msc;
using namespace msc::kinematics;

namespace {

SegmentSpec segment(std::string name, double length, std::string parent, std::vector<Vec3> dirs) {
  SegmentSpec s;
  s.name = std::move(name);
  s.length = length;
  s.parent = std::move(parent);
  s.orientations = std::move(dirs);
  return s;
}

SkeletonModel two_segment_model(Vec3 first, Vec3 second, double l1, double l2, Voxel root = {}) {
  return SkeletonModel(Space::grid3d(10, 10, 10), root,
                       {segment("upper", l1, "root", {first}), segment("lower", l2, "upper", {second})},
                       {{"arm", {0, 1}, -1}});
}

double norm(Voxel v) { return std::sqrt(double(v.x * v.x + v.y * v.y + v.z * v.z)); }

}  // namespace

TEST_CASE("lambda maps") {
  const auto grid = Space::grid3d(10, 10, 10);
  const auto fam = make_lambda_family(grid, segment("s", 3, "root", {Vec3::UnitX()}));
  const auto moved = fam[0].apply(Field::impulse(grid, grid.key(0, 0, 0)));
  CHECK(moved == Field::impulse(grid, grid.key(3, 0, 0)));
  const auto interior = Field::impulse(grid, grid.key(5, 5, 5));
  CHECK(fam[0].apply(fam[0].adjoint(interior)) == interior);

  const auto second = make_lambda_family(grid, segment("t", 2, "root", {Vec3::UnitY()}));
  CHECK(second[0].apply(moved) == Field::impulse(grid, grid.key(3, 2, 0)));
}

TEST_CASE("forward kinematics") {
  const auto down = two_segment_model(Vec3::UnitY(), Vec3::UnitY(), 2, 2);
  const int idx[] = {0, 0};
  const auto pose = forward_kinematics(down, idx);
  CHECK(pose.distal[0] == Voxel{0, 2, 0});
  CHECK(pose.distal[1] == Voxel{0, 4, 0});
  CHECK(pose.proximal[1] == pose.distal[0]);

  const auto bent = two_segment_model(Vec3::UnitX(), Vec3::UnitY(), 3, 2);
  CHECK(forward_kinematics(bent, idx).distal[1] == Voxel{3, 2, 0});

  const auto off = two_segment_model(Vec3::UnitX(), Vec3::UnitX(), 5, 5);
  try {
    forward_kinematics(off, idx);
    FAIL("expected out-of-bounds");
  } catch (const OutOfBoundsError& e) {
    CHECK(e.segment() == "lower");
  }
}

TEST_CASE("cone sampling and displacement rounding") {
  const Cone cone{{0, 1, 1}, 35.0, 200};
  const auto dirs = fibonacci_cone(cone);
  REQUIRE(dirs.size() == 200);
  CHECK(dirs == fibonacci_cone(cone));
  const Vec3 axis = Vec3(0, 1, 1).normalized();
  for (const auto& d : dirs) {
    CHECK(d.norm() == doctest::Approx(1.0));
    CHECK(d.dot(axis) >= std::cos(35.0 * M_PI / 180.0) - 1e-12);
  }
  CHECK(fibonacci_cone({axis, 10.0, 1}).front().isApprox(axis));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> len(1.0, 20.0);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 d(n(rng), n(rng), n(rng));
    const double l = len(rng);
    CHECK(std::abs(norm(displacement_for(d, l)) - l) <= 0.5 + 1e-9);
  }
}

TEST_CASE("lambda members agree with forward kinematics") {
  const auto model = load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto canon = canonical_indices(model);
  for (std::size_t s = 0; s < model.segments().size(); ++s) {
    const auto fam = make_lambda_family(model.grid(), model.segment(s));
    for (std::size_t k = 0; k < fam.size(); ++k) {
      auto idx = canon;
      idx[s] = static_cast<int>(k);
      PoseSolution pose;
      try {
        pose = forward_kinematics(model, idx);
      } catch (const OutOfBoundsError&) {
        continue;
      }
      const auto out = fam[k].apply(Field::impulse(model.grid(), model.grid().key(pose.proximal[s])));
      CHECK(out == Field::impulse(model.grid(), model.grid().key(pose.distal[s])));
    }
  }
}

TEST_CASE("kinematic family arithmetic") {
  std::vector<SegmentSpec> segs;
  std::vector<ChainSpec> chains;
  const int counts[] = {5000, 5000, 5000, 5000, 2500, 2500, 2500, 2500,
                        200,  200,  200,  200,  200,  200,  200,  200};
  for (int copy = 0; copy < 4; ++copy)
    for (int i = 0; i < 16; ++i) {
      const std::string name = "s" + std::to_string(copy) + "_" + std::to_string(i);
      auto s = segment(name, 20, "root", fibonacci_cone({{0, 1, 0}, 90.0, counts[i]}));
      chains.push_back({name, {static_cast<int>(segs.size())}, -1});
      segs.push_back(std::move(s));
    }
  const SkeletonModel model(Space::grid3d(64, 64, 64), {32, 32, 32}, std::move(segs), std::move(chains));
  CHECK(model.total_orientations() == 126400);
}

TEST_CASE("skeleton loading validates topology") {
  const auto model = load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  CHECK(model.chains().size() == 3);
  CHECK(model.chain_order().front() == model.chain_index("spine"));
  CHECK(model.chain(static_cast<std::size_t>(model.chain_index("left_leg"))).upstream ==
        model.chain_index("spine"));

  auto base = nlohmann::json::parse(R"({
    "grid": [8, 8, 8], "root": [4, 1, 4],
    "segments": [
      {"name": "a", "length": 2, "parent": "root", "orientations": [[0, 1, 0]]},
      {"name": "b", "length": 2, "parent": "a", "orientations": [[0, 1, 0]]}],
    "chains": [{"name": "c", "segments": ["a", "b"]}]})");
  CHECK(skeleton_from_json(base).segments().size() == 2);

  auto bad = base;
  bad["segments"][1]["parent"] = "zzz";
  CHECK_THROWS_AS(skeleton_from_json(bad), ConfigError);
  bad = base;
  bad["chains"][0]["segments"] = {"b", "a"};
  CHECK_THROWS_AS(skeleton_from_json(bad), ConfigError);
  bad = base;
  bad["segments"][0].erase("orientations");
  CHECK_THROWS_AS(skeleton_from_json(bad), ConfigError);
  bad = base;
  bad["segments"][0]["parent"] = "b";
  CHECK_THROWS_AS(skeleton_from_json(bad), ConfigError);
  bad = base;
  bad["chains"] = {{{"name", "c"}, {"segments", {"a"}}}};
  CHECK_THROWS_AS(skeleton_from_json(bad), ConfigError);
}

TEST_CASE("single-segment IK picks the matching orientation") {
  const auto dirs = planar_fan(Vec3::UnitX(), Vec3::UnitY(), 12);
  const SkeletonModel model(Space::grid3d(20, 20, 3), {10, 10, 1}, {segment("s", 5, "root", dirs)},
                            {{"c", {0}, -1}});
  const auto& grid = model.grid();
  const auto root = Field::impulse(grid, grid.key(model.root()));
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const auto target = model.root() + model.segment(0).displacements[k];
    const auto result = solve_ik(model, 0, root, Field::impulse(grid, grid.key(target)));
    REQUIRE(result.status == CircuitStatus::converged);
    CHECK(result.pose->indices[0] == static_cast<int>(k));
    CHECK(result.max_applications <= result.application_bound);
  }
  const auto far = Field::impulse(grid, grid.key(0, 0, 0));
  CHECK(solve_ik(model, 0, root, far).status == CircuitStatus::no_solution);
  CHECK_THROWS_AS(build_ik_circuit(model, 0, root, Field(grid)), ContractError);
}

TEST_CASE("three-segment correspondences follow the chained pattern") {
  std::mt19937_64 rng(12);
  const auto dirs = planar_fan(Vec3::UnitX(), Vec3::UnitY(), 6);
  const SkeletonModel model(Space::grid3d(30, 30, 3), {15, 15, 1},
                            {segment("a", 4, "root", dirs), segment("b", 3, "a", dirs),
                             segment("c", 2, "b", dirs)},
                            {{"arm", {0, 1, 2}, -1}});
  const auto& grid = model.grid();
  const Voxel p0 = model.root();
  std::map<Voxel, double> z;
  z[p0 + Voxel{6, 2, 0}] = 1.0;
  z[p0 + Voxel{-3, 5, 0}] = 0.5;
  std::vector<Entry> ze;
  for (auto& [v, w] : z) ze.push_back({grid.key(v), w});
  auto circuit = build_ik_circuit(model, 0, Field::impulse(grid, grid.key(p0)),
                                  Field::from_entries(grid, ze));
  circuit.iterate();

  // Independent evaluation: sum over every composition passing through the member.
  const auto& d0 = model.segment(0).displacements;
  const auto& d1 = model.segment(1).displacements;
  const auto& d2 = model.segment(2).displacements;
  std::vector<std::vector<double>> q(3, std::vector<double>(6, 0.0));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) {
        const auto end = p0 + d0[i] + d1[j] + d2[k];
        const auto it = z.find(end);
        if (it == z.end()) continue;
        q[0][i] += it->second;
        q[1][j] += it->second;
        q[2][k] += it->second;
      }
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t k = 0; k < 6; ++k)
      CHECK(circuit.stage(s).correspondence(k) == doctest::Approx(q[s][k]).epsilon(1e-12));
}

TEST_CASE("chain handoff") {
  const auto model = load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto& grid = model.grid();
  const int spine = model.chain_index("spine");
  const auto pose = forward_kinematics(model, canonical_indices(model));
  const auto seed = chain_handoff(model, pose, spine);
  REQUIRE(seed.size() == 1);
  const int chest_end = model.chain(static_cast<std::size_t>(spine)).segments.back();
  CHECK(grid.voxel(seed.entries()[0].key) == pose.distal[static_cast<std::size_t>(chest_end)]);

  // Two surviving loci upstream give a two-impulse seed.
  const auto& chest = model.segment(static_cast<std::size_t>(chest_end));
  const Voxel a = model.root() + chest.displacements[0];
  const Voxel b = model.root() + chest.displacements[1];
  auto up = build_ik_circuit(model, spine, Field::impulse(grid, grid.key(model.root())),
                             Field::from_entries(grid, {{grid.key(a), 1.0}, {grid.key(b), 1.0}}));
  for (std::size_t k = 2; k < chest.displacements.size(); ++k) up.stage(0).kill(k);
  up.iterate();
  const auto two = chain_handoff(up);
  CHECK(two.size() == 2);
  CHECK(two.weight(grid.key(a)) > 0.0);
  CHECK(two.weight(grid.key(b)) > 0.0);
}

TEST_CASE("chained solves reproduce forward kinematics") {
  const auto model = load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto& grid = model.grid();
  std::mt19937_64 rng(99);
  int exact = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> planted;
    for (const auto& s : model.segments())
      planted.push_back(std::uniform_int_distribution<int>(0, int(s.orientations.size()) - 1)(rng));
    const auto truth = forward_kinematics(model, planted);
    // Each chain is steered by an impulse at every one of its joints.
    std::vector<int> solved(planted.size(), -1);
    std::map<int, Field> seeds;
    bool ok = true;
    for (int c : model.chain_order()) {
      const auto& chain = model.chain(static_cast<std::size_t>(c));
      std::vector<std::optional<MaskField>> masks;
      for (int s : chain.segments)
        masks.push_back(MaskField::from_values(grid, 0.0, {{grid.key(truth.distal[std::size_t(s)]), 1.0}}));
      const Field start = chain.upstream < 0 ? Field::impulse(grid, grid.key(model.root())) : seeds.at(chain.upstream);
      const Field target = Field::impulse(grid, grid.key(truth.distal[std::size_t(chain.segments.back())]));
      auto circuit = build_ik_circuit(model, c, start, target, masks);
      ok = ok && circuit.run() == CircuitStatus::converged;
      if (!ok) break;
      const auto pose = trace_chain(model, c, circuit);
      for (std::size_t k = 0; k < chain.segments.size(); ++k) solved[std::size_t(chain.segments[k])] = pose->indices[k];
      seeds[c] = chain_handoff(circuit);
    }
    if (!ok) continue;
    const auto again = forward_kinematics(model, solved);
    if (again.distal == truth.distal) ++exact;
  }
  CHECK(exact == 10);
}
