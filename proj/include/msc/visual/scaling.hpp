#pragma once

#include <span>
#include <string>
#include <vector>

namespace msc::visual {

struct FamilyCount {
  std::string name;
  double count = 0.0;
};

// Work for a search that enumerates compositions versus one whose cost adds
// up family sizes.
struct SearchCost {
  double additive = 0.0;
  double multiplicative = 1.0;
};

SearchCost search_cost(std::span<const FamilyCount> families);

}  // namespace msc::visual
