#pragma once

#include <span>
#include <vector>

#include "msc/core/space.hpp"

namespace msc {

struct Entry {
  CellKey key = 0;
  double weight = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse nonnegative field over a Space. Entries are sorted by key, unique,
// and strictly positive.
class Field {
 public:
  Field() = default;
  explicit Field(Space space) : space_(space) {}

  // Sorts (stably), sums duplicate keys and drops zero weights. Negative or
  // non-finite weights and keys outside the space are contract violations.
  static Field from_entries(Space space, std::vector<Entry> entries);
  static Field impulse(Space space, CellKey key, double weight = 1.0);

  const Space& space() const noexcept { return space_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  double weight(CellKey key) const noexcept;
  double total() const noexcept;
  double max_weight() const noexcept;
  Field scaled(double factor) const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  friend class FieldBuilder;

  Space space_;
  std::vector<Entry> entries_;
};

// Accumulates unordered contributions and produces a canonical Field.
class FieldBuilder {
 public:
  explicit FieldBuilder(Space space) : space_(space) {}

  void reserve(std::size_t n) { pending_.reserve(n); }
  void add(CellKey key, double weight) {
    if (weight != 0.0) pending_.push_back({key, weight});
  }
  void add_field(const Field& field, double gain = 1.0);

  Field build();

 private:
  Space space_;
  std::vector<Entry> pending_;
};

// Dot product of two fields on the same space.
double correspondence(const Field& a, const Field& b);

// Pointwise product and sum.
Field multiply(const Field& a, const Field& b);
Field add(const Field& a, const Field& b);

// Keeps only the entries whose keys appear in `support`.
Field restrict_to(const Field& field, const Field& support);

// Rescales so that the largest weight is 1. Empty fields are returned unchanged.
Field normalized_to_max(const Field& field);

}  // namespace msc
