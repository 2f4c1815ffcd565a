#pragma once

#include <memory>
#include <random>
#include <vector>

#include "msc/core/circuit.hpp"
#include "msc/core/grid_transforms.hpp"

namespace msc::testing {

inline Field random_field(std::mt19937_64& rng, const Space& space, int count,
                          double min_weight = 0.1) {
  std::uniform_int_distribution<CellKey> cell(0, space.key_count() - 1);
  std::uniform_real_distribution<double> weight(min_weight, 1.0);
  std::vector<Entry> entries;
  for (int i = 0; i < count; ++i) entries.push_back({cell(rng), weight(rng)});
  return Field::from_entries(space, std::move(entries));
}

inline TransformFamily random_shift_family(std::mt19937_64& rng, const Space& space, int size,
                                           int reach) {
  std::uniform_int_distribution<int> d(-reach, reach);
  TransformFamily family;
  for (int i = 0; i < size; ++i)
    family.add(std::make_shared<GridShift>(space, Voxel{d(rng), d(rng), 0}));
  return family;
}

inline MaskField random_mask(std::mt19937_64& rng, const Space& space, int overrides) {
  std::uniform_int_distribution<CellKey> cell(0, space.key_count() - 1);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<Entry> entries;
  for (int i = 0; i < overrides; ++i) entries.push_back({cell(rng), value(rng)});
  return MaskField::from_values(space, 0.5 + 0.5 * value(rng), std::move(entries));
}

}  // namespace msc::testing

namespace msc::testing {

// A few short random strokes near the grid centre, like a sparse edge map.
inline Field random_strokes(std::mt19937_64& rng, const Space& space, int strokes, int margin) {
  std::uniform_int_distribution<int> px(margin, space.nx() - 1 - margin);
  std::uniform_int_distribution<int> py(margin, space.ny() - 1 - margin);
  std::uniform_int_distribution<int> len(2, 5);
  std::uniform_int_distribution<int> dir(0, 7);
  std::uniform_real_distribution<double> weight(0.5, 1.0);
  static constexpr int dx[] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dy[] = {0, 1, 1, 1, 0, -1, -1, -1};
  std::vector<Entry> entries;
  for (int s = 0; s < strokes; ++s) {
    int x = px(rng);
    int y = py(rng);
    const int d = dir(rng);
    const int n = len(rng);
    const double w = weight(rng);
    for (int i = 0; i < n; ++i) {
      if (x >= margin && y >= margin && x < space.nx() - margin && y < space.ny() - margin)
        entries.push_back({space.key(x, y), w});
      x += dx[d];
      y += dy[d];
    }
  }
  return Field::from_entries(space, std::move(entries));
}

}  // namespace msc::testing
