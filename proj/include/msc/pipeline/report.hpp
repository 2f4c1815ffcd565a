#pragma once

#include <exception>
#include <string>

#include <json.hpp>

#include "msc/kinematics/ik.hpp"
#include "msc/pipeline/oracle.hpp"
#include "msc/pipeline/reconstruct.hpp"

namespace msc::pipeline {

inline constexpr int report_schema = 1;

// Result documents with a fixed field order so that equal results serialize
// to equal bytes. Angles are in degrees, loci in voxels.
nlohmann::ordered_json plant_json(const VisualSearch& search, const PlantSpec& plant);
nlohmann::ordered_json joints_json(const kinematics::SkeletonModel& model,
                                   const kinematics::PoseSolution& joints);
nlohmann::ordered_json result_json(const VisualSearch& search, const ReconstructionResult& result);
nlohmann::ordered_json oracle_json(const VisualSearch& search, const OracleResult& result);
nlohmann::ordered_json ik_json(const kinematics::SkeletonModel& model, int chain,
                               const kinematics::IkResult& result);

// {"schema":1,"error":{"kind":...,"message":...}} plus kind-specific fields.
nlohmann::ordered_json error_json(const std::exception& error);

// Parses "shift,scale,rotation,view;variants...;pose..." where each index
// list is comma separated. Throws ConfigError on bad syntax or ranges.
PlantSpec parse_plant_indices(const VisualSearch& search, const std::string& text);

}  // namespace msc::pipeline
