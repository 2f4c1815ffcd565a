#include "msc/core/collusion.hpp"

#include <sstream>

#include "msc/core/errors.hpp"

namespace msc {

std::string CollusionTrace::summary() const {
  std::ostringstream os;
  os << inversions.size() << " ordering inversion(s)";
  if (!inversions.empty()) {
    const auto& first = inversions.front();
    os << ", first at iteration " << first.iteration << " stage " << first.stage << ": member "
       << first.leader << " q=" << first.leader_q << " over reference " << first.reference
       << " q=" << first.reference_q;
  }
  if (suppressed_at >= 0)
    os << "; reference suppressed at iteration " << suppressed_at << " in stage "
       << suppressed_stage;
  return os.str();
}

CollusionTrace trace_collusion(const Circuit& circuit, const Composition& reference) {
  if (reference.size() != circuit.stage_count())
    throw ContractError("reference composition has the wrong stage count");
  CollusionTrace trace;
  for (const auto& record : circuit.history()) {
    for (std::size_t s = 0; s < reference.size(); ++s) {
      const auto& family = circuit.stage(s).family();
      const auto& q = record.q[s];
      for (std::size_t g = 0; g < reference[s].size(); ++g) {
        const auto ref = static_cast<std::size_t>(reference[s][g]);
        double best = -1.0;
        int leader = -1;
        for (std::size_t j = 0; j < q.size(); ++j) {
          if (family.group(j) != static_cast<int>(g)) continue;
          if (q[j] > best) {
            best = q[j];
            leader = static_cast<int>(j);
          }
        }
        if (leader >= 0 && q[ref] < best)
          trace.inversions.push_back({record.iteration, s, static_cast<int>(g),
                                      static_cast<int>(ref), leader, q[ref], best});
        if (trace.suppressed_at < 0 && record.gains_after[s][ref] == 0.0) {
          trace.suppressed_at = record.iteration;
          trace.suppressed_stage = s;
        }
      }
    }
  }
  return trace;
}

}  // namespace msc
