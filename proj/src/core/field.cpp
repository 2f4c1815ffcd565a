#include "msc/core/field.hpp"

#include <algorithm>
#include <cmath>

#include "msc/core/errors.hpp"

namespace msc {

namespace {

void canonicalize(const Space& space, std::vector<Entry>& entries) {
  const auto limit = space.key_count();
  for (const auto& e : entries) {
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw ContractError("field weights must be finite and nonnegative");
    if (e.key >= limit) throw ContractError("field key outside " + space.describe());
  }
  if (!std::is_sorted(entries.begin(), entries.end(),
                      [](const Entry& a, const Entry& b) { return a.key < b.key; })) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.key < b.key; });
  }
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries.size();) {
    const CellKey key = entries[i].key;
    double sum = 0.0;
    for (; i < entries.size() && entries[i].key == key; ++i) sum += entries[i].weight;
    if (sum > 0.0) entries[out++] = {key, sum};
  }
  entries.resize(out);
}

void require_same_space(const Field& a, const Field& b) {
  if (a.space() != b.space())
    throw ContractError("field space mismatch: " + a.space().describe() + " vs " +
                        b.space().describe());
}

}  // namespace

Field Field::from_entries(Space space, std::vector<Entry> entries) {
  FieldBuilder builder(space);
  builder.reserve(entries.size());
  for (const auto& e : entries) builder.add(e.key, e.weight);
  return builder.build();
}

Field Field::impulse(Space space, CellKey key, double weight) {
  return from_entries(space, {{key, weight}});
}

double Field::weight(CellKey key) const noexcept {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                                   [](const Entry& e, CellKey k) { return e.key < k; });
  return it != entries_.end() && it->key == key ? it->weight : 0.0;
}

double Field::total() const noexcept {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.weight;
  return sum;
}

double Field::max_weight() const noexcept {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.weight);
  return m;
}

Field Field::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw ContractError("field scale factor must be finite and nonnegative");
  Field out(space_);
  if (factor == 0.0) return out;
  out.entries_.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double w = e.weight * factor;
    if (w > 0.0) out.entries_.push_back({e.key, w});
  }
  return out;
}

void FieldBuilder::add_field(const Field& field, double gain) {
  if (field.space() != space_) throw ContractError("field space mismatch in builder");
  pending_.reserve(pending_.size() + field.size());
  for (const auto& e : field.entries()) add(e.key, gain * e.weight);
}

Field FieldBuilder::build() {
  Field out(space_);
  canonicalize(space_, pending_);
  out.entries_ = std::move(pending_);
  pending_ = {};
  return out;
}

double correspondence(const Field& a, const Field& b) {
  require_same_space(a, b);
  const auto ea = a.entries();
  const auto eb = b.entries();
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].key < eb[j].key) {
      ++i;
    } else if (eb[j].key < ea[i].key) {
      ++j;
    } else {
      sum += ea[i].weight * eb[j].weight;
      ++i;
      ++j;
    }
  }
  return sum;
}

Field multiply(const Field& a, const Field& b) {
  require_same_space(a, b);
  std::vector<Entry> out;
  const auto ea = a.entries();
  const auto eb = b.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].key < eb[j].key) {
      ++i;
    } else if (eb[j].key < ea[i].key) {
      ++j;
    } else {
      out.push_back({ea[i].key, ea[i].weight * eb[j].weight});
      ++i;
      ++j;
    }
  }
  return Field::from_entries(a.space(), std::move(out));
}

Field add(const Field& a, const Field& b) {
  require_same_space(a, b);
  FieldBuilder builder(a.space());
  builder.add_field(a);
  builder.add_field(b);
  return builder.build();
}

Field restrict_to(const Field& field, const Field& support) {
  require_same_space(field, support);
  std::vector<Entry> out;
  const auto ea = field.entries();
  const auto eb = support.entries();
  std::size_t j = 0;
  for (const auto& e : ea) {
    while (j < eb.size() && eb[j].key < e.key) ++j;
    if (j < eb.size() && eb[j].key == e.key) out.push_back(e);
  }
  return Field::from_entries(field.space(), std::move(out));
}

Field normalized_to_max(const Field& field) {
  const double m = field.max_weight();
  return m > 0.0 ? field.scaled(1.0 / m) : field;
}

}  // namespace msc
