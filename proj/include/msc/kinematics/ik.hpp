#pragma once

#include <optional>
#include <vector>

#include "msc/core/circuit.hpp"
#include "msc/kinematics/skeleton.hpp"

namespace msc::kinematics {

// One stage per chain segment. f0 holds the proximal loci, b_top the
// acceptable end-effector loci. masks[i], when set, multiplies the voxel
// field at segment i's distal joint.
Circuit build_ik_circuit(const SkeletonModel& model, int chain, Field proximal, Field targets,
                         const std::vector<std::optional<MaskField>>& masks = {},
                         CircuitParams params = {}, double rate = 0.1);

// Seeds a downstream chain from a solved pose: an impulse at the end joint.
Field chain_handoff(const SkeletonModel& model, const PoseSolution& upstream, int upstream_chain);
// Seeds a downstream chain from a running circuit: the surviving end loci.
Field chain_handoff(const Circuit& upstream);

struct ChainPose {
  std::vector<int> indices;
  std::vector<Voxel> proximal;
  std::vector<Voxel> distal;
};

// Reads the chain's current leading indices and walks them from the best
// proximal locus (the one whose walk ends on the strongest target weight).
// Returns nothing when no proximal locus exists.
std::optional<ChainPose> trace_chain(const SkeletonModel& model, int chain, const Circuit& circuit);

struct IkResult {
  CircuitStatus status = CircuitStatus::running;
  int iterations = 0;
  bool degenerate = false;
  std::optional<ChainPose> pose;
  std::size_t max_applications = 0;
  std::size_t application_bound = 0;
};

IkResult solve_ik(const SkeletonModel& model, int chain, Field proximal, Field targets,
                  const std::vector<std::optional<MaskField>>& masks = {},
                  CircuitParams params = {}, double rate = 0.1);

}  // namespace msc::kinematics
