#include "msc/pipeline/oracle.hpp"

#include <map>

#include "msc/core/errors.hpp"
#include "msc/core/exhaustive.hpp"

namespace msc::pipeline {

namespace {

constexpr double tie_tolerance = 1e-12;

bool beats(double candidate, double incumbent) {
  return candidate > incumbent + tie_tolerance * std::max(1.0, std::abs(incumbent));
}

// Every (segment, proximal, distal) hypothesis reachable from the root
// without leaving the grid.
Field reachable_hypotheses(const kinematics::SkeletonModel& model, const Space& pairs) {
  const auto& grid = model.grid();
  const auto segments = model.segments();
  std::vector<std::vector<Voxel>> starts(segments.size());
  std::vector<Entry> keys;
  // Parents precede children in model order.
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const int parent = model.parent_of(static_cast<int>(s));
    if (parent < 0) starts[s] = {model.root()};
    for (const Voxel& p : starts[s])
      for (const Voxel& d : segments[s].displacements) {
        const Voxel q = p + d;
        if (!grid.contains(q)) continue;
        keys.push_back({pairs.pair_key(static_cast<int>(s), p, q), 1.0});
        for (std::size_t c = s + 1; c < segments.size(); ++c)
          if (model.parent_of(static_cast<int>(c)) == static_cast<int>(s)) starts[c].push_back(q);
      }
  }
  return Field::from_entries(pairs, std::move(keys));
}

struct Choice {
  double value = 0.0;
  int orientation = -1;
};

}  // namespace

double search_product(const VisualSearch& search) {
  double n = static_cast<double>(search.planar().shift.size()) *
             static_cast<double>(search.planar().scale.size()) *
             static_cast<double>(search.planar().rotation.size()) *
             static_cast<double>(search.views().size());
  for (std::size_t s = 0; s < search.widths().size(); ++s)
    n *= static_cast<double>(search.widths()[s].size()) *
         static_cast<double>(search.model().segment(s).orientations.size());
  return n;
}

OracleResult brute_force_oracle(const VisualSearch& search, const Field& input, double budget) {
  const double product = search_product(search);
  check_budget(product, budget);
  if (input.space() != search.image()) throw ContractError("oracle input is on the wrong space");

  const auto& model = search.model();
  const auto& pairs = search.pairs();
  const auto segments = model.segments();
  const std::size_t n_seg = segments.size();
  const Field hypotheses = reachable_hypotheses(model, pairs);

  // Children of every segment, and the view-frame keys each view needs.
  std::vector<std::vector<std::size_t>> children(n_seg);
  std::vector<std::size_t> roots;
  for (std::size_t s = 0; s < n_seg; ++s) {
    const int p = model.parent_of(static_cast<int>(s));
    (p < 0 ? roots : children[static_cast<std::size_t>(p)]).push_back(s);
  }
  std::vector<Field> view_keys;
  for (std::size_t v = 0; v < search.view().size(); ++v)
    view_keys.push_back(search.view()[v].adjoint(hypotheses));

  OracleResult result;
  result.product = product;
  result.value = -1.0;
  const auto& planar = search.planar();
  for (std::size_t i = 0; i < planar.shift.size(); ++i) {
    const Field shifted = planar.shift[i].apply(input);
    for (std::size_t j = 0; j < planar.scale.size(); ++j) {
      const Field scaled = planar.scale[j].apply(shifted);
      for (std::size_t k = 0; k < planar.rotation.size(); ++k) {
        const Field model_frame = planar.rotation[k].apply(scaled);
        for (std::size_t v = 0; v < search.view().size(); ++v) {
          // Best variant score of every body-frame hypothesis.
          std::map<CellKey, std::pair<double, int>> score;
          for (std::size_t m = 0; m < search.morph().size(); ++m) {
            const Field view_frame = search.morph()[m].apply(model_frame, &view_keys[v]);
            const Field body = search.view()[v].apply(view_frame, &hypotheses);
            const int variant = search.variant_of(m);
            for (const auto& e : body.entries()) {
              auto [it, fresh] = score.try_emplace(e.key, e.weight, variant);
              if (!fresh && beats(e.weight, it->second.first)) it->second = {e.weight, variant};
            }
          }
          result.evaluated += hypotheses.size() * search.morph().size() / n_seg;

          // Best subtree value hanging from each (segment, proximal locus).
          std::map<std::pair<std::size_t, CellKey>, Choice> memo;
          auto best = [&](auto&& self, std::size_t s, Voxel p) -> Choice {
            const auto memo_key = std::make_pair(s, model.grid().key(p));
            if (const auto it = memo.find(memo_key); it != memo.end()) return it->second;
            Choice c;
            c.value = -1.0;
            const auto& disp = segments[s].displacements;
            for (std::size_t o = 0; o < disp.size(); ++o) {
              const Voxel q = p + disp[o];
              if (!model.grid().contains(q)) continue;
              double total = 0.0;
              const auto it = score.find(pairs.pair_key(static_cast<int>(s), p, q));
              if (it != score.end()) total += it->second.first;
              bool feasible = true;
              for (std::size_t child : children[s]) {
                const Choice sub = self(self, child, q);
                if (sub.orientation < 0) feasible = false;
                total += sub.value;
              }
              if (feasible && (c.orientation < 0 || beats(total, c.value)))
                c = {total, static_cast<int>(o)};
            }
            memo[memo_key] = c;
            return c;
          };
          double total = 0.0;
          bool feasible = true;
          for (std::size_t r : roots) {
            const Choice c = best(best, r, model.root());
            feasible = feasible && c.orientation >= 0;
            total += c.value;
          }
          if (!feasible || !(result.value < 0.0 || beats(total, result.value))) continue;

          // Read the winning pose and variants back down the tree.
          PlantSpec plant;
          plant.visual = {i, j, k};
          plant.view = v;
          plant.pose.assign(n_seg, -1);
          plant.variants.assign(n_seg, 0);
          std::vector<std::pair<std::size_t, Voxel>> stack;
          for (std::size_t r : roots) stack.emplace_back(r, model.root());
          while (!stack.empty()) {
            const auto [s, p] = stack.back();
            stack.pop_back();
            const int o = best(best, s, p).orientation;
            plant.pose[s] = o;
            const Voxel q = p + segments[s].displacements[static_cast<std::size_t>(o)];
            const auto it = score.find(pairs.pair_key(static_cast<int>(s), p, q));
            if (it != score.end()) plant.variants[s] = it->second.second;
            for (std::size_t child : children[s]) stack.emplace_back(child, q);
          }
          result.best = std::move(plant);
          result.value = total;
        }
      }
    }
  }
  if (result.value < 0.0) throw ContractError("oracle found no pose inside the grid");
  return result;
}

}  // namespace msc::pipeline
