#include "msc/visual/plant.hpp"

#include "msc/core/errors.hpp"

namespace msc::visual {

Field plant_through(const Field& top, std::span<const Transform* const> bottom_to_top) {
  Field f = top;
  for (auto it = bottom_to_top.rbegin(); it != bottom_to_top.rend(); ++it) {
    if (*it == nullptr) throw ContractError("null stage member in plant");
    f = (*it)->adjoint(f);
  }
  return f;
}

Field plant_visual_instance(const Field& pattern, const VisualFamilies& families,
                            const VisualIndices& indices) {
  if (indices.shift >= families.shift.size() || indices.scale >= families.scale.size() ||
      indices.rotation >= families.rotation.size())
    throw ContractError("plant indices outside the family ranges");
  const Transform* chain[] = {&families.shift[indices.shift], &families.scale[indices.scale],
                              &families.rotation[indices.rotation]};
  return plant_through(pattern, chain);
}

}  // namespace msc::visual
