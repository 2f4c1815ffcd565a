#include <doctest.h>

#include <random>

#include "msc/core/circuit.hpp"
#include "msc/core/collusion.hpp"
#include "msc/core/errors.hpp"
#include "msc/core/exhaustive.hpp"
#include "support/random_fields.hpp"

using namespace msc;

namespace {

TransformFamily shifts(const Space& s, std::initializer_list<Voxel> offsets) {
  TransformFamily f;
  for (auto o : offsets) f.add(std::make_shared<GridShift>(s, o));
  return f;
}

Stage stage_with_q(std::vector<double> q, double rate) {
  const auto s = Space::grid2d(2, 2);
  TransformFamily f;
  for (std::size_t i = 0; i < q.size(); ++i) f.add(std::make_shared<GridShift>(s, Voxel{}));
  Stage stage(f, rate);
  for (std::size_t i = 0; i < q.size(); ++i) stage.set_correspondence(i, q[i]);
  return stage;
}

}  // namespace

TEST_CASE("gain update examples") {
  auto a = stage_with_q({2.0, 1.0}, 0.5);
  a.update_gains({});
  CHECK(a.gain(0) == 1.0);
  CHECK(a.gain(1) == 0.75);

  auto tie = stage_with_q({5.0, 5.0}, 3.0);
  CHECK_FALSE(tie.update_gains({}));
  CHECK(tie.gain(0) == 1.0);
  CHECK(tie.gain(1) == 1.0);

  auto dead = stage_with_q({0.0, 0.0, 0.0}, 0.1);
  dead.update_gains({});
  CHECK(dead.live_count() == 0);

  auto clamp = stage_with_q({10.0, 0.0}, 5.0);
  clamp.update_gains({});
  CHECK(clamp.gain(1) == 0.0);

  auto threshold = stage_with_q({1.0, 0.9}, 0.1);
  threshold.set_gains({1.0, 0.0105});
  threshold.update_gains({.threshold = 0.01});
  CHECK(threshold.gain(1) == 0.0);
}

TEST_CASE("gain update competes within groups") {
  const auto s = Space::grid2d(2, 2);
  TransformFamily f;
  for (int g = 0; g < 2; ++g)
    for (int i = 0; i < 2; ++i) f.add(std::make_shared<GridShift>(s, Voxel{}), g);
  Stage stage(f, 0.5);
  const double q[] = {4.0, 2.0, 1.0, 0.5};
  for (std::size_t i = 0; i < 4; ++i) stage.set_correspondence(i, q[i]);
  stage.update_gains({});
  CHECK(stage.gain(0) == 1.0);
  CHECK(stage.gain(1) == 0.75);
  CHECK(stage.gain(2) == 1.0);
  CHECK(stage.gain(3) == 0.75);
}

TEST_CASE("backward pass") {
  const auto s = Space::grid2d(8, 8);
  const auto top = Field::impulse(s, s.key(4, 4));

  Circuit single({Stage(shifts(s, {{1, 0, 0}}))}, Field(s), top);
  single.backward_pass();
  CHECK(single.backward_field(1) == top);

  // Two stages: the lower space receives pre-images of both top shifts.
  Circuit two({Stage(shifts(s, {{0, 0, 0}})), Stage(shifts(s, {{1, 0, 0}, {0, 2, 0}}))},
              Field(s), top);
  two.backward_pass();
  const auto& b = two.backward_field(1);
  CHECK(b.size() == 2);
  CHECK(b.weight(s.key(3, 4)) == 1.0);
  CHECK(b.weight(s.key(4, 2)) == 1.0);
}

TEST_CASE("forward pass finds the planted member") {
  const auto s = Space::grid2d(12, 12);
  std::mt19937_64 rng(5);
  const auto top = testing::random_field(rng, s, 15);
  auto family = shifts(s, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, -1, 0}, {-1, -1, 0}});
  const auto f0 = family[3].adjoint(top);
  Circuit c({Stage(family)}, f0, top);
  c.iterate();
  const auto q = c.stage(0).correspondences();
  for (std::size_t j = 0; j < q.size(); ++j)
    if (j != 3) CHECK(q[j] < q[3]);

  Circuit zero({Stage(family)}, Field(s), top);
  CHECK(zero.iterate() == CircuitStatus::no_solution);
  for (double v : zero.stage(0).correspondences()) CHECK(v == 0.0);
}

TEST_CASE("disjoint supports end without a solution") {
  const auto s = Space::grid2d(20, 20);
  const auto f0 = Field::from_entries(s, {{s.key(1, 1), 1.0}, {s.key(2, 1), 0.5}});
  const auto top = Field::from_entries(s, {{s.key(18, 18), 1.0}, {s.key(17, 18), 0.3}});
  Circuit c({Stage(shifts(s, {{0, 0, 0}, {1, 1, 0}})), Stage(shifts(s, {{0, 1, 0}, {2, 0, 0}}))},
            f0, top);
  CHECK(c.run() == CircuitStatus::no_solution);
  CHECK(c.iterations() <= c.params().max_iterations);
}

TEST_CASE("planted instances converge to the exhaustive argmax") {
  const auto s = Space::grid2d(24, 24);
  int matched = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::vector<Stage> stages;
    for (int L = 0; L < 3; ++L) stages.emplace_back(testing::random_shift_family(rng, s, 6, 4));
    const auto top = testing::random_field(rng, s, 25);
    std::uniform_int_distribution<int> pick(0, 5);
    Field f0 = top;
    for (int L = 2; L >= 0; --L) f0 = stages[static_cast<std::size_t>(L)].family()[static_cast<std::size_t>(pick(rng))].adjoint(f0);
    Circuit c(std::move(stages), f0, top);
    const auto status = c.run();
    CHECK(status != CircuitStatus::max_iterations);
    const auto oracle = exhaustive_argmax(c);
    if (status == CircuitStatus::converged && composition_value(c, *c.solution()) == oracle.value)
      ++matched;
  }
  CHECK(matched >= 19);
}

TEST_CASE("aggressive rates never livelock") {
  const auto s = Space::grid2d(16, 16);
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(100 + seed));
    std::vector<Stage> stages;
    for (int L = 0; L < 2; ++L) stages.emplace_back(testing::random_shift_family(rng, s, 8, 3), 5.0);
    const auto top = testing::random_field(rng, s, 30);
    const auto f0 = testing::random_field(rng, s, 30);
    Circuit c(std::move(stages), f0, top);
    const auto status = c.run();
    CHECK((status == CircuitStatus::converged || status == CircuitStatus::no_solution));
  }
}

TEST_CASE("objective") {
  const auto s = Space::grid2d(10, 10);
  std::mt19937_64 rng(9);
  const auto top = testing::random_field(rng, s, 20);
  const auto f0 = testing::random_field(rng, s, 40);
  std::vector<Stage> stages;
  stages.emplace_back(shifts(s, {{1, 0, 0}, {0, 1, 0}}));
  stages.emplace_back(shifts(s, {{2, 0, 0}, {-1, 1, 0}, {0, 0, 0}}));
  Circuit c(std::move(stages), f0, top);

  CHECK(c.objective({{0, 0}, {0, 0, 0}}) == 0.0);
  const double single = c.objective({{0, 1}, {1, 0, 0}});
  const auto chain = c.stage(0).family()[1].adjoint(c.stage(1).family()[0].adjoint(top));
  CHECK(single == doctest::Approx(correspondence(f0, chain)).epsilon(1e-14));
}

TEST_CASE("application counts stay within the additive bound and shrink") {
  const auto s = Space::grid2d(16, 16);
  std::mt19937_64 rng(21);
  std::vector<Stage> stages;
  for (int L = 0; L < 3; ++L) stages.emplace_back(testing::random_shift_family(rng, s, 5, 3));
  const auto top = testing::random_field(rng, s, 20);
  auto f0 = top;
  for (int L = 2; L >= 0; --L) f0 = stages[static_cast<std::size_t>(L)].family()[1].adjoint(f0);
  Circuit c(std::move(stages), f0, top);
  auto live = [&c] {
    std::size_t n = 0;
    for (std::size_t L = 0; L < c.stage_count(); ++L) n += c.stage(L).live_count();
    return n;
  };
  std::size_t previous_live = live();
  std::size_t previous_apps = 0;
  bool shrank = false;
  while (c.status() == CircuitStatus::running) {
    const std::size_t live_now = live();
    c.iterate();
    CHECK(c.applications_last_iteration() <= c.application_bound());
    if (previous_apps > 0 && live_now < previous_live) {
      CHECK(c.applications_last_iteration() < previous_apps);
      shrank = true;
    }
    previous_live = live_now;
    previous_apps = c.applications_last_iteration();
  }
  CHECK(shrank);
}

TEST_CASE("stalled ties resolve to the lowest index") {
  const auto s = Space::grid2d(8, 8);
  const auto top = Field::impulse(s, s.key(4, 4));
  const auto f0 = Field::impulse(s, s.key(3, 4));
  // Members 1 and 2 are identical, so they tie forever.
  Circuit c({Stage(shifts(s, {{0, 1, 0}, {1, 0, 0}, {1, 0, 0}}))}, f0, top);
  CHECK(c.run() == CircuitStatus::converged);
  CHECK((*c.solution())[0][0] == 1);
  CHECK(c.degenerate()[0]);
  CHECK(c.iterations() <= 12 + 10);
}

TEST_CASE("masks are sound on both passes") {
  const auto s = Space::grid2d(10, 10);
  std::mt19937_64 rng(4);
  std::vector<Stage> stages;
  stages.emplace_back(testing::random_shift_family(rng, s, 4, 2));
  stages.emplace_back(testing::random_shift_family(rng, s, 4, 2));
  const auto mask = MaskField::from_values(s, 1.0, {{s.key(5, 5), 0.0}, {s.key(4, 5), 0.0}});
  stages[0].set_mask(mask);
  Circuit c(std::move(stages), testing::random_field(rng, s, 60), testing::random_field(rng, s, 60));
  for (int i = 0; i < 5; ++i) {
    c.iterate();
    CHECK(c.forward_field(1).weight(s.key(5, 5)) == 0.0);
    CHECK(c.backward_field(1).weight(s.key(5, 5)) == 0.0);
    CHECK(c.forward_field(1).weight(s.key(4, 5)) == 0.0);
  }
}

TEST_CASE("budget and collusion plumbing") {
  const auto s = Space::grid2d(8, 8);
  Circuit c({Stage(shifts(s, {{0, 0, 0}, {1, 0, 0}})), Stage(shifts(s, {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}}))},
            Field::impulse(s, 0), Field::impulse(s, 9));
  CHECK(composition_count(c) == 6.0);
  CHECK_THROWS_AS(exhaustive_argmax(c, 5.0), BudgetExceeded);
  try {
    check_budget(2.3514624e15, 1e7);
  } catch (const BudgetExceeded& e) {
    CHECK(e.product() == 2.3514624e15);
  }
  c.run();
  const auto trace = trace_collusion(c, {{0}, {0}});
  CHECK(trace.explains_mismatch());
  CHECK_FALSE(trace.summary().empty());
}
