#pragma once

#include <cstdint>
#include <vector>

#include "msc/core/circuit.hpp"

namespace msc {

// Product of the per-group family sizes, as a double to survive overflow.
double composition_count(const Circuit& circuit);

// Throws BudgetExceeded when `count` > `budget`.
void check_budget(double count, double budget);

// Correspondence of a single composition: every selected member at unit gain,
// masks applied on spaces 1..m-1, compared against f0 on space 0.
double composition_value(const Circuit& circuit, const Composition& composition);

struct ExhaustiveResult {
  Composition best;
  double value = 0.0;
  // Compositions reaching `value` within the relative tolerance.
  std::uint64_t optimal_count = 0;
  std::uint64_t evaluated = 0;
};

// Enumerates every composition of the circuit's stages and returns the
// maximum. Ties resolve to the lexicographically smallest composition.
ExhaustiveResult exhaustive_argmax(const Circuit& circuit, double budget = 1e7,
                                   double tie_tolerance = 1e-12);

}  // namespace msc
