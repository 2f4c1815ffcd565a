#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msc/constraints/masks.hpp"
#include "msc/pipeline/visual_circuit.hpp"

namespace msc::pipeline {

struct StabilityReport {
  bool statically_unstable = false;
  double com_offset = 0.0;
  kinematics::Vec3 center_of_mass = kinematics::Vec3::Zero();
  std::optional<std::string> diagnostic;
};

struct ReconstructionResult {
  CircuitStatus status = CircuitStatus::running;
  int iterations = 0;
  // Visual parameters, morph variants and pose indices (-1 where unresolved).
  PlantSpec solution;
  std::optional<kinematics::PoseSolution> joints;
  // Correspondence of the final composition as the circuit evaluates it, and
  // of the input against an independent re-render of the same solution.
  double correspondence = 0.0;
  std::optional<double> rerender_correspondence;
  std::vector<bool> visual_degenerate;
  std::vector<bool> pose_degenerate;
  std::optional<StabilityReport> stability;
  std::vector<std::string> collusion;
  // Transform applications of the busiest outer iteration, and the additive
  // bound 2 * (sum of all family sizes).
  std::size_t max_applications = 0;
  std::size_t application_bound = 0;

  bool self_consistent(double tolerance = 1e-9) const;
};

struct ReconstructOptions {
  // When given, mismatching stages are traced for collusion against it.
  std::optional<PlantSpec> reference;
};

ReconstructionResult reconstruct(const Field& input, const PipelineConfig& config,
                                 const ReconstructOptions& options = {});

// Top image positions of each segment's distal joint, scored by the best
// evidence of any hypothesis ending there, seen through `view`.
std::vector<std::vector<constraints::ImagePoint>> joint_lobes(const Field& evidence,
                                                              const kinematics::SkeletonModel& model,
                                                              const morph::ViewAngles& view,
                                                              int count);

}  // namespace msc::pipeline
