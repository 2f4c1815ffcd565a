#include "msc/core/transform.hpp"

#include <cmath>

#include "msc/core/errors.hpp"

namespace msc {

Field Transform::apply(const Field& in, const Field* relevant) const {
  if (in.space() != input_space())
    throw ContractError(label() + ": input is " + in.space().describe() + ", expected " +
                        input_space().describe());
  if (relevant != nullptr && relevant->space() != output_space())
    throw ContractError(label() + ": relevance field is on the wrong space");
  return do_apply(in, relevant);
}

Field Transform::adjoint(const Field& in) const {
  if (in.space() != output_space())
    throw ContractError(label() + ": adjoint input is " + in.space().describe() + ", expected " +
                        output_space().describe());
  return do_adjoint(in);
}

TransformFamily::TransformFamily(std::vector<TransformPtr> members) {
  for (auto& m : members) add(std::move(m));
}

void TransformFamily::add(TransformPtr member, int group) {
  if (!member) throw ContractError("null transform in family");
  if (group < 0) throw ContractError("negative competition group");
  if (!members_.empty() && (member->input_space() != members_.front()->input_space() ||
                            member->output_space() != members_.front()->output_space()))
    throw ContractError("family members must share input and output spaces");
  members_.push_back(std::move(member));
  groups_.push_back(group);
  group_count_ = std::max(group_count_, group + 1);
}

const Space& TransformFamily::input_space() const {
  if (members_.empty()) throw ContractError("empty transform family");
  return members_.front()->input_space();
}

const Space& TransformFamily::output_space() const {
  if (members_.empty()) throw ContractError("empty transform family");
  return members_.front()->output_space();
}

Field aggregate(const Space& space, std::span<const WeightedField> inputs,
                const AggregationPolicy& policy) {
  const bool lp = policy.mode == AggregationPolicy::Mode::lp_norm;
  if (lp && !(policy.p >= 1.0)) throw ContractError("Lp aggregation needs p >= 1");
  FieldBuilder builder(space);
  std::size_t n = 0;
  for (const auto& in : inputs) n += in.field != nullptr ? in.field->size() : 0;
  builder.reserve(n);
  for (const auto& in : inputs) {
    if (in.field == nullptr || in.gain == 0.0) continue;
    if (in.field->space() != space) throw ContractError("aggregate input on the wrong space");
    if (in.gain < 0.0) throw ContractError("negative gain in aggregate");
    for (const auto& e : in.field->entries()) {
      const double v = in.gain * e.weight;
      builder.add(e.key, lp ? std::pow(v, policy.p) : v);
    }
  }
  Field sum = builder.build();
  if (!lp || policy.p == 1.0) return sum;
  std::vector<Entry> rooted(sum.entries().begin(), sum.entries().end());
  for (auto& e : rooted) e.weight = std::pow(e.weight, 1.0 / policy.p);
  return Field::from_entries(space, std::move(rooted));
}

}  // namespace msc
