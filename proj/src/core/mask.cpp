#include "msc/core/mask.hpp"

#include <algorithm>
#include <cmath>

#include "msc/core/errors.hpp"

namespace msc {

namespace {

void require_unit(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ContractError("mask values must lie in [0,1]");
}

}  // namespace

MaskField::MaskField(Space space, double fill) : space_(space), fill_(fill) { require_unit(fill); }

MaskField MaskField::from_values(Space space, double fill, std::vector<Entry> overrides) {
  MaskField m(space, fill);
  const auto limit = space.key_count();
  for (const auto& e : overrides) {
    require_unit(e.weight);
    if (e.key >= limit) throw ContractError("mask key outside " + space.describe());
  }
  std::stable_sort(overrides.begin(), overrides.end(),
                   [](const Entry& a, const Entry& b) { return a.key < b.key; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < overrides.size();) {
    const CellKey key = overrides[i].key;
    double v = 1.0;
    for (; i < overrides.size() && overrides[i].key == key; ++i) v *= overrides[i].weight;
    overrides[out++] = {key, v};
  }
  overrides.resize(out);
  m.overrides_ = std::move(overrides);
  return m;
}

double MaskField::at(CellKey key) const noexcept {
  const auto it = std::lower_bound(overrides_.begin(), overrides_.end(), key,
                                   [](const Entry& e, CellKey k) { return e.key < k; });
  return it != overrides_.end() && it->key == key ? it->weight : fill_;
}

Field MaskField::apply(const Field& field) const {
  if (field.space() != space_)
    throw ContractError("mask space mismatch: " + space_.describe() + " vs " +
                        field.space().describe());
  std::vector<Entry> out;
  out.reserve(field.size());
  std::size_t j = 0;
  for (const auto& e : field.entries()) {
    while (j < overrides_.size() && overrides_[j].key < e.key) ++j;
    const double m =
        j < overrides_.size() && overrides_[j].key == e.key ? overrides_[j].weight : fill_;
    const double w = e.weight * m;
    if (w > 0.0) out.push_back({e.key, w});
  }
  return Field::from_entries(space_, std::move(out));
}

MaskField MaskField::combined(const MaskField& other) const {
  if (other.space_ != space_) throw ContractError("mask space mismatch in combine");
  std::vector<Entry> merged;
  merged.reserve(overrides_.size() + other.overrides_.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < overrides_.size() || j < other.overrides_.size()) {
    if (j >= other.overrides_.size() ||
        (i < overrides_.size() && overrides_[i].key < other.overrides_[j].key)) {
      merged.push_back({overrides_[i].key, overrides_[i].weight * other.fill_});
      ++i;
    } else if (i >= overrides_.size() || other.overrides_[j].key < overrides_[i].key) {
      merged.push_back({other.overrides_[j].key, other.overrides_[j].weight * fill_});
      ++j;
    } else {
      merged.push_back({overrides_[i].key, overrides_[i].weight * other.overrides_[j].weight});
      ++i;
      ++j;
    }
  }
  MaskField out(space_, fill_ * other.fill_);
  out.overrides_ = std::move(merged);
  return out;
}

Field MaskField::support_field() const {
  if (fill_ != 0.0) throw ContractError("support_field requires a zero fill");
  std::vector<Entry> out;
  for (const auto& e : overrides_)
    if (e.weight > 0.0) out.push_back(e);
  return Field::from_entries(space_, std::move(out));
}

}  // namespace msc
