#pragma once

#include <span>

#include "msc/core/transform.hpp"
#include "msc/visual/families.hpp"

namespace msc::visual {

// Pushes a top-level pattern down through the selected stage members by
// applying their adjoints from the last stage to the first. A circuit built
// from the same stages, fed the result as f0 and `top` as b_top, has the
// selected composition as a maximizer of its objective.
Field plant_through(const Field& top, std::span<const Transform* const> bottom_to_top);

// Image produced by placing `pattern` at the given shift, scale and rotation.
Field plant_visual_instance(const Field& pattern, const VisualFamilies& families,
                            const VisualIndices& indices);

}  // namespace msc::visual
