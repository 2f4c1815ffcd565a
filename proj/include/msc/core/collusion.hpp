#pragma once

#include <string>
#include <vector>

#include "msc/core/circuit.hpp"

namespace msc {

// An iteration where a reference member's correspondence fell below its
// group's maximum, i.e. another composition outcompeted it.
struct OrderingInversion {
  int iteration = 0;
  std::size_t stage = 0;
  int group = 0;
  int reference = 0;
  int leader = 0;
  double reference_q = 0.0;
  double leader_q = 0.0;
};

struct CollusionTrace {
  std::vector<OrderingInversion> inversions;
  // Iteration where the first reference member reached zero gain (-1: never).
  int suppressed_at = -1;
  std::size_t suppressed_stage = 0;
  bool explains_mismatch() const noexcept { return !inversions.empty() || suppressed_at >= 0; }
  std::string summary() const;
};

// Scans a circuit's recorded history for evidence that `reference` lost.
CollusionTrace trace_collusion(const Circuit& circuit, const Composition& reference);

}  // namespace msc
