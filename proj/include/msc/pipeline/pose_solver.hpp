#pragma once

#include <map>
#include <optional>
#include <vector>

#include "msc/core/circuit.hpp"
#include "msc/kinematics/skeleton.hpp"
#include "msc/pipeline/config.hpp"

namespace msc::pipeline {

// One inverse-kinematics circuit per chain, coupled along the chain tree.
//
// A sweep runs every chain's backward pass from the leaves up: a chain's
// targets are its end joint's mask over the loci it can currently reach,
// multiplied by what each downstream chain's backward field says about
// those loci as its starting points. The forward passes then run from the
// root down, each downstream chain starting from its upstream chain's
// surviving end loci.
class KinematicSweep {
 public:
  // static_masks[s], when set, always multiplies segment s's distal joint.
  KinematicSweep(const kinematics::SkeletonModel& model, const MscSettings& msc,
                 std::vector<std::optional<MaskField>> static_masks = {});

  // joint_masks[s] (optional) multiplies segment s's distal joint for this
  // sweep; end_masks[c] further restricts chain c's targets.
  void sweep(const std::vector<std::optional<MaskField>>& joint_masks,
             const std::map<int, MaskField>& end_masks = {});

  // Every live orientation of every segment from every locus its stage
  // receives, weighted by locus weight times gain and scaled so each
  // segment's strongest hypothesis has weight 1.
  Field hypotheses(const Space& pairs) const;

  bool converged() const;
  bool no_solution() const;
  int sweeps() const noexcept { return sweeps_; }

  // Leading orientation per segment (-1 where a stage has no live member).
  std::vector<int> leader_indices() const;
  std::optional<kinematics::PoseSolution> leader_pose() const;
  // Per segment: its stage needed a stall resolution.
  std::vector<bool> degenerate() const;

  const Circuit& chain_circuit(int chain) const { return circuits_.at(static_cast<std::size_t>(chain)); }
  std::size_t applications_last_sweep() const noexcept { return applications_; }
  std::size_t application_bound() const noexcept;

 private:
  Field chain_start(int chain) const;

  const kinematics::SkeletonModel* model_;
  std::vector<std::optional<MaskField>> static_masks_;
  std::vector<Circuit> circuits_;
  std::size_t applications_ = 0;
  int sweeps_ = 0;
};

}  // namespace msc::pipeline
