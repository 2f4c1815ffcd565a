#include "msc/visual/scaling.hpp"

namespace msc::visual {

SearchCost search_cost(std::span<const FamilyCount> families) {
  SearchCost cost;
  for (const auto& f : families) {
    cost.additive += f.count;
    cost.multiplicative *= f.count;
  }
  return cost;
}

}  // namespace msc::visual
