#pragma once

#include <cstdint>

#include "msc/pipeline/visual_circuit.hpp"

namespace msc::pipeline {

struct OracleResult {
  PlantSpec best;
  double value = 0.0;
  // Number of compositions the search stands for.
  double product = 0.0;
  // Segment hypotheses scored.
  std::uint64_t evaluated = 0;
};

// Product of every family size: shifts, scales, rotations, views, and per
// segment its variants and orientations.
double search_product(const VisualSearch& search);

// Exact argmax of the input's correspondence with a rendered plant over the
// whole search space. The pose part is maximized segment by segment down the
// skeleton tree, which is exact because a figure's score is the sum of its
// segments' scores. Ties resolve to the lowest indices, visual parameters
// first. Throws BudgetExceeded when search_product exceeds the budget.
OracleResult brute_force_oracle(const VisualSearch& search, const Field& input, double budget);

}  // namespace msc::pipeline
