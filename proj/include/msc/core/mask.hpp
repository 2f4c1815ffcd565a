#pragma once

#include <span>
#include <vector>

#include "msc/core/field.hpp"

namespace msc {

// Pointwise multiplier in [0,1]: a fill value plus sparse per-cell overrides.
class MaskField {
 public:
  MaskField() = default;
  MaskField(Space space, double fill);

  // Overrides may be zero (a hard veto). Duplicate keys multiply.
  static MaskField from_values(Space space, double fill, std::vector<Entry> overrides);

  const Space& space() const noexcept { return space_; }
  double fill() const noexcept { return fill_; }
  std::span<const Entry> overrides() const noexcept { return overrides_; }

  double at(CellKey key) const noexcept;
  Field apply(const Field& field) const;
  MaskField combined(const MaskField& other) const;

  // The positive cells as a field. Only valid when fill == 0.
  Field support_field() const;

 private:
  Space space_;
  double fill_ = 1.0;
  std::vector<Entry> overrides_;
};

}  // namespace msc
