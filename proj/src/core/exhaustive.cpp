#include "msc/core/exhaustive.hpp"

#include <cmath>

#include "msc/core/errors.hpp"

namespace msc {

namespace {

std::vector<std::vector<std::size_t>> members_by_group(const Stage& stage) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(stage.family().group_count()));
  for (std::size_t j = 0; j < stage.size(); ++j)
    out[static_cast<std::size_t>(stage.family().group(j))].push_back(j);
  return out;
}

// Vertex operator of one stage: the sum over groups of the chosen member's
// adjoint, followed by the mask of the stage below (if any).
Field vertex_adjoint(const Circuit& circuit, std::size_t s, const std::vector<int>& choice,
                     const Field& in) {
  const auto& stage = circuit.stage(s);
  FieldBuilder builder(stage.family().input_space());
  for (int j : choice) builder.add_field(stage.family()[static_cast<std::size_t>(j)].adjoint(in));
  Field out = builder.build();
  if (s > 0 && circuit.stage(s - 1).mask()) out = circuit.stage(s - 1).mask()->apply(out);
  return out;
}

// All choice vectors for a stage (one member per group), in lexicographic order.
std::vector<std::vector<int>> stage_choices(const Stage& stage) {
  const auto groups = members_by_group(stage);
  std::vector<std::vector<int>> out{{}};
  for (const auto& members : groups) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out)
      for (std::size_t j : members) {
        auto c = prefix;
        c.push_back(static_cast<int>(j));
        next.push_back(std::move(c));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

double composition_count(const Circuit& circuit) {
  double product = 1.0;
  for (std::size_t s = 0; s < circuit.stage_count(); ++s)
    for (const auto& members : members_by_group(circuit.stage(s)))
      product *= static_cast<double>(members.size());
  return product;
}

void check_budget(double count, double budget) {
  if (count > budget) throw BudgetExceeded(count, budget);
}

double composition_value(const Circuit& circuit, const Composition& composition) {
  if (composition.size() != circuit.stage_count())
    throw ContractError("composition has the wrong stage count");
  Field b = circuit.backward_input();
  for (std::size_t s = circuit.stage_count(); s-- > 0;)
    b = vertex_adjoint(circuit, s, composition[s], b);
  return correspondence(circuit.forward_input(), b);
}

ExhaustiveResult exhaustive_argmax(const Circuit& circuit, double budget, double tie_tolerance) {
  check_budget(composition_count(circuit), budget);
  const std::size_t m = circuit.stage_count();
  std::vector<std::vector<std::vector<int>>> choices(m);
  for (std::size_t s = 0; s < m; ++s) choices[s] = stage_choices(circuit.stage(s));

  ExhaustiveResult result;
  Composition current(m);
  bool have_best = false;

  // Walk from the top stage down so every partial backward field is built once.
  auto visit = [&](auto&& self, std::size_t s, const Field& b) -> void {
    for (const auto& choice : choices[s]) {
      current[s] = choice;
      Field below = vertex_adjoint(circuit, s, choice, b);
      if (s > 0) {
        self(self, s - 1, below);
        continue;
      }
      const double v = correspondence(circuit.forward_input(), below);
      ++result.evaluated;
      const double scale = std::max(std::abs(v), std::abs(result.value));
      if (!have_best || v > result.value + tie_tolerance * scale) {
        result.value = v;
        result.best = current;
        result.optimal_count = 1;
        have_best = true;
      } else if (std::abs(v - result.value) <= tie_tolerance * scale) {
        ++result.optimal_count;
        if (current < result.best) result.best = current;
      }
    }
  };
  visit(visit, m - 1, circuit.backward_input());
  return result;
}

}  // namespace msc
