#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "msc/core/field.hpp"

namespace msc {

// A linear map between two spaces together with its exact transpose.
//
// `apply` may use `relevant` (a field on the output space) to skip output
// cells that cannot contribute to a correspondence against it; grid
// transforms ignore it, pair-keyed transforms depend on it.
class Transform {
 public:
  virtual ~Transform() = default;

  virtual const Space& input_space() const noexcept = 0;
  virtual const Space& output_space() const noexcept = 0;
  virtual std::string label() const = 0;

  Field apply(const Field& in, const Field* relevant = nullptr) const;
  Field adjoint(const Field& in) const;

 protected:
  virtual Field do_apply(const Field& in, const Field* relevant) const = 0;
  virtual Field do_adjoint(const Field& in) const = 0;
};

using TransformPtr = std::shared_ptr<const Transform>;

// Indexed, ordered list of transforms sharing input and output spaces.
// Members carry a competition group; a plain family has a single group 0.
class TransformFamily {
 public:
  TransformFamily() = default;
  explicit TransformFamily(std::vector<TransformPtr> members);

  void add(TransformPtr member, int group = 0);

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const Transform& operator[](std::size_t i) const { return *members_.at(i); }
  const TransformPtr& ptr(std::size_t i) const { return members_.at(i); }
  int group(std::size_t i) const { return groups_.at(i); }
  int group_count() const noexcept { return group_count_; }

  const Space& input_space() const;
  const Space& output_space() const;

 private:
  std::vector<TransformPtr> members_;
  std::vector<int> groups_;
  int group_count_ = 0;
};

struct AggregationPolicy {
  enum class Mode { superposition, lp_norm };

  Mode mode = Mode::superposition;
  double p = 1.0;

  static AggregationPolicy superposition() { return {}; }
  static AggregationPolicy lp_norm(double p) { return {Mode::lp_norm, p}; }
};

struct WeightedField {
  double gain = 0.0;
  const Field* field = nullptr;
};

// Combines gain-weighted fields: a plain sum, or the elementwise Lp norm
// (sum of (g*v)^p)^(1/p).
Field aggregate(const Space& space, std::span<const WeightedField> inputs,
                const AggregationPolicy& policy = {});

}  // namespace msc
