#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "msc/core/circuit.hpp"
#include "msc/core/errors.hpp"
#include "msc/morph/outline.hpp"
#include "msc/morph/ppm.hpp"
#include "msc/morph/view.hpp"
#include "support/random_fields.hpp"

using namespace msc;
using namespace msc::morph;

namespace {

struct Box {
  int x0, y0, x1, y1;
};

Box bounds(const std::vector<PixelOffset>& cells) {
  Box b{cells.front().dx, cells.front().dy, cells.front().dx, cells.front().dy};
  for (const auto& c : cells) {
    b.x0 = std::min(b.x0, c.dx);
    b.x1 = std::max(b.x1, c.dx);
    b.y0 = std::min(b.y0, c.dy);
    b.y1 = std::max(b.y1, c.dy);
  }
  return b;
}

// Reference rasterizer: point-to-segment distance through the closest point
// computed with Eigen, every segment tested against every pixel.
bool on_outline(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                double h) {
  const Eigen::Vector2d ab = b - a;
  double t = ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
  t = std::max(0.0, std::min(1.0, t));
  const double d = (p - (a + t * ab)).norm();
  return h < 1 ? d <= 0.5 + 1e-9 : (d >= h - 0.5 - 1e-9 && d <= h + 0.5 + 1e-9);
}

// Brute-force rasterizer: every outline carries unit L2 norm, counted over
// the unclipped plane.
Field reference_render(const Space& image, const kinematics::PoseSolution& pose,
                       std::span<const double> half_widths) {
  std::vector<double> acc(static_cast<std::size_t>(image.nx() * image.ny()), 0.0);
  for (std::size_t s = 0; s < pose.proximal.size(); ++s) {
    const Eigen::Vector2d a(pose.proximal[s].x, pose.proximal[s].y);
    const Eigen::Vector2d b(pose.distal[s].x, pose.distal[s].y);
    const double h = half_widths[s];
    const int pad = static_cast<int>(std::ceil(h)) + 2;
    std::vector<std::pair<int, int>> cells;
    for (int y = static_cast<int>(std::min(a.y(), b.y())) - pad; y <= std::max(a.y(), b.y()) + pad; ++y)
      for (int x = static_cast<int>(std::min(a.x(), b.x())) - pad; x <= std::max(a.x(), b.x()) + pad; ++x)
        if (on_outline(Eigen::Vector2d(x, y), a, b, h)) cells.push_back({x, y});
    const double w = 1.0 / std::sqrt(static_cast<double>(cells.size()));
    for (const auto& [x, y] : cells)
      if (x >= 0 && y >= 0 && x < image.nx() && y < image.ny())
        acc[static_cast<std::size_t>(y * image.nx() + x)] += w;
  }
  std::vector<Entry> out;
  for (int y = 0; y < image.ny(); ++y)
    for (int x = 0; x < image.nx(); ++x)
      if (const double v = acc[static_cast<std::size_t>(y * image.nx() + x)]; v > 0)
        out.push_back({image.key(x, y), v});
  return Field::from_entries(image, std::move(out));
}

double max_gap(const Field& a, const Field& b) {
  double gap = 0;
  for (const auto& e : a.entries()) gap = std::max(gap, std::abs(e.weight - b.weight(e.key)));
  for (const auto& e : b.entries()) gap = std::max(gap, std::abs(e.weight - a.weight(e.key)));
  return gap;
}

Field pose_pairs(const Space& pairs, const kinematics::PoseSolution& pose) {
  std::vector<Entry> e;
  for (std::size_t s = 0; s < pose.proximal.size(); ++s)
    e.push_back({pairs.pair_key(int(s), pose.proximal[s], pose.distal[s]), 1.0});
  return Field::from_entries(pairs, std::move(e));
}

}  // namespace

TEST_CASE("view rotation") {
  const auto grid = Space::grid3d(21, 21, 21);
  const Voxel c{10, 10, 10};
  const auto at = [&](Voxel v) { return Field::impulse(grid, grid.key(v)); };

  const auto f = at({3, 14, 8});
  CHECK(rotate_view(f, {0, 0}) == f);
  // Azimuth turns +x toward -z, elevation turns +y toward +z.
  CHECK(rotate_view(at(c + Voxel{6, 0, 0}), {90, 0}) == at(c + Voxel{0, 0, -6}));
  CHECK(rotate_view(at(c + Voxel{0, 6, 0}), {0, 90}) == at(c + Voxel{0, 0, 6}));
  CHECK(rotate_view(at(c + Voxel{6, 0, 0}), {90, 90}) == at(c + Voxel{0, 6, 0}));

  const auto rot = make_view_rotation(grid, {90, 0});
  const auto interior = at({12, 9, 7});
  CHECK(rot.adjoint(rot.apply(interior)) == interior);

  ViewFamilySpec spec{{-30, 0, 30}, {0, 15}};
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.views().size() == 6);
  CHECK(spec.views()[spec.identity_index()] == ViewAngles{});
  CHECK_THROWS_AS((ViewFamilySpec{{10, 20}, {0}}.validate()), ConfigError);
}

TEST_CASE("orthographic projection") {
  const auto grid = Space::grid3d(8, 8, 6);
  const auto image = Space::grid2d(8, 8);
  for (int z = 0; z < 6; ++z)
    CHECK(project_ortho(Field::impulse(grid, grid.key(3, 4, z))) ==
          Field::impulse(image, image.key(3, 4)));
  const auto column =
      Field::from_entries(grid, {{grid.key(3, 4, 1), 0.5}, {grid.key(3, 4, 5), 0.25}});
  CHECK(project_ortho(column).weight(image.key(3, 4)) == 0.75);

  // Dyadic weights keep every partial sum exact, whatever the order.
  std::mt19937_64 rng(7);
  auto dyadic = [&](int n) {
    std::vector<Entry> e;
    const auto raw = testing::random_field(rng, grid, n);
    for (const auto& x : raw.entries())
      e.push_back({x.key, std::ceil(x.weight * 8) / 8});
    return Field::from_entries(grid, std::move(e));
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = dyadic(30);
    auto b = dyadic(30);
    b = Field::from_entries(grid, [&] {
      std::vector<Entry> keep;
      for (const auto& e : b.entries())
        if (a.weight(e.key) == 0.0) keep.push_back(e);
      return keep;
    }());
    CHECK(project_ortho(a).total() == doctest::Approx(a.total()).epsilon(1e-12));
    CHECK(project_ortho(add(a, b)) == add(project_ortho(a), project_ortho(b)));
    CHECK(project_ortho(rotate_view(a, {0, 0})) == project_ortho(a));

    const OrthographicProjection proj(grid);
    const auto img = testing::random_field(rng, image, 10);
    CHECK(correspondence(proj.apply(a), img) ==
          doctest::Approx(correspondence(a, proj.adjoint(img))).epsilon(1e-12));
  }
}

TEST_CASE("capsule outline geometry") {
  // Horizontal axis of length 10, half-width 2: every cell at distance
  // within [1.5, 2.5] from the axis.
  const auto cells = capsule_outline(10, 0, 2.0);
  std::vector<PixelOffset> expected;
  for (int y = -4; y <= 4; ++y)
    for (int x = -4; x <= 14; ++x) {
      const double dx = x < 0 ? x : (x > 10 ? x - 10 : 0);
      const double d = std::sqrt(dx * dx + double(y * y));
      if (d >= 1.5 && d <= 2.5) expected.push_back({x, y});
    }
  CHECK(cells == expected);
  const auto box = bounds(cells);
  CHECK(box.x1 - box.x0 == 14);
  CHECK(box.y1 - box.y0 == 4);

  // Thin limit: the axis itself.
  const auto thin = capsule_outline(10, 0, 0.6);
  REQUIRE(thin.size() == 11);
  for (int i = 0; i <= 10; ++i) CHECK(thin[std::size_t(i)] == PixelOffset{i, 0});
  const auto diagonal = capsule_outline(4, 4, 0.5);
  for (int i = 0; i <= 4; ++i)
    CHECK(std::find(diagonal.begin(), diagonal.end(), PixelOffset{i, i}) != diagonal.end());

  // Zero-length axis: a ring around the point.
  const auto ring = capsule_outline(0, 0, 3.0);
  for (const auto& c : ring) {
    const double d = std::hypot(c.dx, c.dy);
    CHECK(d >= 2.5);
    CHECK(d <= 3.5);
  }
  CHECK(std::find(ring.begin(), ring.end(), PixelOffset{3, 0}) != ring.end());
  CHECK(std::find(ring.begin(), ring.end(), PixelOffset{0, 0}) == ring.end());

  // Wider never shrinks the bounding box.
  const std::pair<int, int> axes[] = {{10, 0}, {3, 7}, {-5, 2}, {0, 0}, {6, -6}};
  for (auto [ax, ay] : axes) {
    Box prev = bounds(capsule_outline(ax, ay, 0.4));
    for (double h = 0.6; h <= 5.0; h += 0.2) {
      const Box b = bounds(capsule_outline(ax, ay, h));
      CHECK(b.x0 <= prev.x0);
      CHECK(b.y0 <= prev.y0);
      CHECK(b.x1 >= prev.x1);
      CHECK(b.y1 >= prev.y1);
      prev = b;
    }
  }
  CHECK_THROWS_AS(capsule_outline(1, 1, 0.0), ContractError);
}

TEST_CASE("segment outlines have unit norm") {
  const auto image = Space::grid2d(32, 32);
  const Voxel a{10, 10, 16};
  for (const Voxel b : {Voxel{10, 18, 16}, Voxel{15, 16, 3}, Voxel{4, 12, 20}})
    for (double h : {0.5, 1.0, 2.2, 3.0}) {
      const auto f = morph_project_segment(image, a, b, h);
      double sq = 0;
      for (const auto& e : f.entries()) sq += e.weight * e.weight;
      CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    }
  // Clipped outlines keep the weight of the whole outline.
  const auto edge = morph_project_segment(image, {0, 10, 16}, {0, 20, 16}, 2.0);
  const auto inside = morph_project_segment(image, {12, 10, 16}, {12, 20, 16}, 2.0);
  CHECK(edge.size() < inside.size());
  CHECK(edge.max_weight() == inside.max_weight());
}

TEST_CASE("figure render equals per-segment sum") {
  const auto model = kinematics::load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto image = Space::grid2d(32, 32);
  std::vector<double> widths;
  for (const auto& s : model.segments()) widths.push_back(s.base_width);
  const std::vector<std::vector<int>> poses = {
      {0, 0, 0, 0, 0}, {1, 3, 5, 2, 7}, {4, 7, 1, 6, 3}};
  for (const auto& idx : poses) {
    const auto pose = kinematics::forward_kinematics(model, idx);
    const auto fig = render_figure(image, pose.proximal, pose.distal, widths);
    const auto ref = reference_render(image, pose, widths);
    CHECK(fig.size() == ref.size());
    CHECK(max_gap(fig, ref) < 1e-12);
    FieldBuilder sum(image);
    for (std::size_t s = 0; s < idx.size(); ++s)
      sum.add_field(morph_project_segment(image, pose.proximal[s], pose.distal[s], widths[s]));
    CHECK(max_gap(fig, sum.build()) < 1e-12);
  }
}

TEST_CASE("pair-keyed transforms are exact transposes") {
  const auto model = kinematics::load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto pairs = Space::segment_pairs(32, 32, 32, 5);
  const auto image = Space::grid2d(32, 32);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(4, 27), seg(0, 4);
  auto random_pairs = [&](int n) {
    std::vector<Entry> e;
    for (int i = 0; i < n; ++i)
      e.push_back({pairs.pair_key(seg(rng), {coord(rng), coord(rng), coord(rng)},
                                  {coord(rng), coord(rng), coord(rng)}),
                   0.5 + 0.5 * std::generate_canonical<double, 53>(rng)});
    return Field::from_entries(pairs, std::move(e));
  };

  const ViewFamilySpec spec{{-40, 0, 40}, {0, 20}};
  const auto views = make_pair_view_family(pairs, spec);
  for (std::size_t j = 0; j < views.size(); ++j) {
    const auto body = random_pairs(40);
    // A view-frame field that actually meets the rotated body keys.
    auto view_side = add(views[j].adjoint(body).scaled(0.7), random_pairs(40));
    CHECK(correspondence(views[j].apply(view_side, &body), body) ==
          doctest::Approx(correspondence(view_side, views[j].adjoint(body))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(views[0].apply(random_pairs(3)), ContractError);

  std::vector<std::vector<double>> variants(5, {0.8, 1.0, 1.3});
  const auto morph = build_morph_family(model, image, pairs, variants);
  CHECK(morph.size() == 15);
  CHECK(morph.group_count() == 5);
  for (std::size_t j = 0; j < morph.size(); ++j) {
    const auto hyp = random_pairs(30);
    const auto img = testing::random_field(rng, image, 200);
    CHECK(correspondence(morph[j].apply(img, &hyp), hyp) ==
          doctest::Approx(correspondence(img, morph[j].adjoint(hyp))).epsilon(1e-12));
  }
}

TEST_CASE("morph stage") {
  const auto model = kinematics::load_skeleton(MSC_TEST_DATA "/toy_skeleton.json");
  const auto pairs = Space::segment_pairs(32, 32, 32, 5);
  const auto image = Space::grid2d(32, 32);
  const std::vector<int> idx = {2, 1, 4, 6, 0};
  const auto pose = kinematics::forward_kinematics(model, idx);
  const auto hypotheses = pose_pairs(pairs, pose);

  std::vector<double> base;
  for (const auto& s : model.segments()) base.push_back(s.base_width);

  SUBCASE("single variant passes the canonical contour through") {
    const auto fam = build_morph_family(model, image, pairs, std::vector<std::vector<double>>(5, {1.0}));
    FieldBuilder back(image);
    for (std::size_t j = 0; j < fam.size(); ++j) back.add_field(fam[j].adjoint(hypotheses));
    CHECK(back.build() == render_figure(image, pose.proximal, pose.distal, base));
  }

  SUBCASE("planted width is recovered") {
    const std::vector<double> quiver = {0.8, 1.0, 1.3};
    std::vector<double> planted;
    for (double b : base) planted.push_back(1.3 * b);
    const auto input = render_figure(image, pose.proximal, pose.distal, planted);
    const auto fam = build_morph_family(model, image, pairs,
                                        std::vector<std::vector<double>>(5, quiver));
    // Exhaustive: per segment, the planted variant is the strict maximum.
    for (int s = 0; s < 5; ++s) {
      std::vector<double> q;
      for (int v = 0; v < 3; ++v)
        q.push_back(correspondence(fam[std::size_t(s * 3 + v)].apply(input, &hypotheses),
                                   hypotheses));
      CHECK(q[2] > q[0]);
      CHECK(q[2] > q[1]);
    }
    std::vector<Stage> stages;
    stages.emplace_back(fam, 0.2);
    Circuit circuit(std::move(stages), input, hypotheses, {});
    CHECK(circuit.run() == CircuitStatus::converged);
    for (int s = 0; s < 5; ++s) CHECK(circuit.stage(0).gain(std::size_t(s * 3 + 2)) > 0.0);
  }
}

TEST_CASE("ppm canvas") {
  const auto image = Space::grid2d(4, 3);
  PpmCanvas canvas(4, 3, 2);
  canvas.paint(Field::from_entries(image, {{image.key(1, 1), 2.0}, {image.key(3, 2), 1.0}}),
               {255, 0, 0});
  const int p = canvas.add_panel();
  canvas.paint(Field::impulse(image, image.key(0, 0)), {0, 255, 0}, p);
  const auto bytes = canvas.encode();
  const std::string header = "P6\n18 6\n255\n";
  REQUIRE(bytes.substr(0, header.size()) == header);
  CHECK(bytes.size() == header.size() + 18 * 6 * 3);
  auto px = [&](int x, int y) {
    const auto at = header.size() + std::size_t(y * 18 + x) * 3;
    return std::array<unsigned char, 3>{(unsigned char)bytes[at], (unsigned char)bytes[at + 1],
                                        (unsigned char)bytes[at + 2]};
  };
  CHECK(px(2, 2) == std::array<unsigned char, 3>{255, 0, 0});
  CHECK(px(7, 5) == std::array<unsigned char, 3>{128, 0, 0});
  CHECK(px(10, 0) == std::array<unsigned char, 3>{0, 255, 0});
  CHECK(px(8, 0) == std::array<unsigned char, 3>{48, 48, 48});
  CHECK(canvas.encode() == bytes);
}
