#include "msc/kinematics/skeleton.hpp"

#include <fstream>
#include <map>
#include <set>

#include "msc/core/errors.hpp"
#include "msc/core/grid_transforms.hpp"

namespace msc::kinematics {

namespace {

Vec3 vec3(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " needs three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Voxel voxel3(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " needs three integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

}  // namespace

SkeletonModel::SkeletonModel(Space grid, Voxel root, std::vector<SegmentSpec> segments,
                             std::vector<ChainSpec> chains)
    : grid_(grid), root_(root), segments_(std::move(segments)), chains_(std::move(chains)) {
  if (grid_.kind() != SpaceKind::grid3d) throw ConfigError("skeleton grid must be 3D");
  if (!grid_.contains(root_)) throw ConfigError("skeleton root lies outside the grid");
  if (segments_.empty()) throw ConfigError("skeleton has no segments");

  std::map<std::string, int> by_name;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& s = segments_[i];
    if (s.name.empty() || s.name == "root") throw ConfigError("invalid segment name '" + s.name + "'");
    if (!by_name.emplace(s.name, static_cast<int>(i)).second)
      throw ConfigError("duplicate segment '" + s.name + "'");
    if (!(s.length > 0.0)) throw ConfigError("segment '" + s.name + "' needs a positive length");
    if (s.orientations.empty()) throw ConfigError("segment '" + s.name + "' has no orientations");
    if (!(s.base_width > 0.0)) throw ConfigError("segment '" + s.name + "' needs a positive base_width");
    if (s.mass_fraction && !(*s.mass_fraction >= 0.0))
      throw ConfigError("segment '" + s.name + "' has a negative mass fraction");
    s.displacements.clear();
    for (auto& d : s.orientations) {
      if (!(d.norm() > 0.0)) throw ConfigError("segment '" + s.name + "' has a zero orientation");
      d.normalize();
      s.displacements.push_back(displacement_for(d, s.length));
    }
  }

  parents_.assign(segments_.size(), -1);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& p = segments_[i].parent;
    if (p == "root") continue;
    const auto it = by_name.find(p);
    if (it == by_name.end())
      throw ConfigError("segment '" + segments_[i].name + "' has unknown parent '" + p + "'");
    parents_[i] = it->second;
  }

  // Chains must cover every segment once, each as a parent-linked path.
  std::vector<int> owner(segments_.size(), -1);
  std::set<std::string> chain_names;
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    auto& chain = chains_[c];
    if (!chain_names.insert(chain.name).second) throw ConfigError("duplicate chain '" + chain.name + "'");
    if (chain.segments.empty()) throw ConfigError("chain '" + chain.name + "' is empty");
    for (std::size_t k = 0; k < chain.segments.size(); ++k) {
      const int s = chain.segments[k];
      if (s < 0 || static_cast<std::size_t>(s) >= segments_.size())
        throw ConfigError("chain '" + chain.name + "' references a missing segment");
      if (owner[static_cast<std::size_t>(s)] >= 0)
        throw ConfigError("segment '" + segments_[static_cast<std::size_t>(s)].name +
                          "' belongs to two chains");
      owner[static_cast<std::size_t>(s)] = static_cast<int>(c);
      if (k > 0 && parents_[static_cast<std::size_t>(s)] != chain.segments[k - 1])
        throw ConfigError("chain '" + chain.name + "' is not a parent-linked path");
    }
  }
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (owner[i] < 0) throw ConfigError("segment '" + segments_[i].name + "' is in no chain");

  for (auto& chain : chains_) {
    const int first_parent = parents_[static_cast<std::size_t>(chain.segments.front())];
    if (first_parent < 0) {
      chain.upstream = -1;
      continue;
    }
    const int up = owner[static_cast<std::size_t>(first_parent)];
    if (chains_[static_cast<std::size_t>(up)].segments.back() != first_parent)
      throw ConfigError("chain '" + chain.name + "' must start at the end joint of another chain");
    chain.upstream = up;
  }

  // Topological order; a cycle leaves chains unplaced.
  std::vector<bool> placed(chains_.size(), false);
  while (order_.size() < chains_.size()) {
    bool progress = false;
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      if (placed[c]) continue;
      const int up = chains_[c].upstream;
      if (up < 0 || placed[static_cast<std::size_t>(up)]) {
        placed[c] = true;
        order_.push_back(static_cast<int>(c));
        progress = true;
      }
    }
    if (!progress) throw ConfigError("chain topology has a cycle");
  }
  forward.normalize();
}

int SkeletonModel::segment_index(const std::string& name) const {
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (segments_[i].name == name) return static_cast<int>(i);
  throw ConfigError("unknown segment '" + name + "'");
}

int SkeletonModel::chain_index(const std::string& name) const {
  for (std::size_t i = 0; i < chains_.size(); ++i)
    if (chains_[i].name == name) return static_cast<int>(i);
  throw ConfigError("unknown chain '" + name + "'");
}

std::pair<int, int> SkeletonModel::chain_of(int segment) const {
  for (std::size_t c = 0; c < chains_.size(); ++c)
    for (std::size_t k = 0; k < chains_[c].segments.size(); ++k)
      if (chains_[c].segments[k] == segment) return {static_cast<int>(c), static_cast<int>(k)};
  throw ContractError("segment index out of range");
}

std::vector<int> SkeletonModel::downstream_of(int chain) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < chains_.size(); ++c)
    if (chains_[c].upstream == chain) out.push_back(static_cast<int>(c));
  return out;
}

std::size_t SkeletonModel::total_orientations() const noexcept {
  std::size_t n = 0;
  for (const auto& s : segments_) n += s.orientations.size();
  return n;
}

SkeletonModel skeleton_from_json(const nlohmann::json& j) {
  try {
    const auto g = voxel3(j.at("grid"), "grid");
    const auto grid = Space::grid3d(g.x, g.y, g.z);
    const auto root = voxel3(j.at("root"), "root");
    std::vector<SegmentSpec> segments;
    std::map<std::string, int> index;
    for (const auto& js : j.at("segments")) {
      SegmentSpec s;
      s.name = js.at("name").get<std::string>();
      s.length = js.at("length").get<double>();
      s.parent = js.value("parent", std::string("root"));
      s.base_width = js.value("base_width", 1.0);
      if (js.contains("mass_fraction")) s.mass_fraction = js.at("mass_fraction").get<double>();
      if (js.contains("orientations")) {
        for (const auto& o : js.at("orientations")) s.orientations.push_back(vec3(o, "orientation"));
      } else if (js.contains("cone")) {
        const auto& c = js.at("cone");
        Cone cone{vec3(c.at("axis"), "cone axis"), c.at("half_angle_deg").get<double>(),
                  c.at("count").get<int>()};
        s.orientations = fibonacci_cone(cone);
      } else if (js.contains("fan")) {
        const auto& f = js.at("fan");
        s.orientations = planar_fan(vec3(f.at("u"), "fan u"), vec3(f.at("v"), "fan v"),
                                    f.at("count").get<int>());
      } else {
        throw ConfigError("segment '" + s.name + "' needs a cone, a fan or an orientation list");
      }
      index[s.name] = static_cast<int>(segments.size());
      segments.push_back(std::move(s));
    }
    std::vector<ChainSpec> chains;
    for (const auto& jc : j.at("chains")) {
      ChainSpec c;
      c.name = jc.at("name").get<std::string>();
      for (const auto& name : jc.at("segments")) {
        const auto it = index.find(name.get<std::string>());
        if (it == index.end()) throw ConfigError("chain '" + c.name + "' names an unknown segment");
        c.segments.push_back(it->second);
      }
      chains.push_back(std::move(c));
    }
    SkeletonModel model(grid, root, std::move(segments), std::move(chains));
    if (j.contains("forward")) model.forward = vec3(j.at("forward"), "forward").normalized();
    model.foot_length = j.value("foot_length", 0.0);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("skeleton: ") + e.what());
  }
}

SkeletonModel load_skeleton(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open skeleton '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("skeleton JSON: ") + e.what(), 0, e.byte);
  }
  return skeleton_from_json(j);
}

PoseSolution forward_kinematics(const SkeletonModel& model, std::span<const int> indices) {
  const auto segments = model.segments();
  if (indices.size() != segments.size()) throw ContractError("one index per segment is required");
  PoseSolution pose;
  pose.indices.assign(indices.begin(), indices.end());
  pose.proximal.resize(segments.size());
  pose.distal.resize(segments.size());
  for (int c : model.chain_order()) {
    for (int s : model.chain(static_cast<std::size_t>(c)).segments) {
      const auto si = static_cast<std::size_t>(s);
      const int k = indices[si];
      if (k < 0 || static_cast<std::size_t>(k) >= segments[si].displacements.size())
        throw ContractError("orientation index out of range for segment '" + segments[si].name + "'");
      const int parent = model.parent_of(s);
      const Voxel start = parent < 0 ? model.root() : pose.distal[static_cast<std::size_t>(parent)];
      const Voxel end = start + segments[si].displacements[static_cast<std::size_t>(k)];
      if (!model.grid().contains(end))
        throw OutOfBoundsError("segment '" + segments[si].name + "' leaves the grid", segments[si].name);
      pose.proximal[si] = start;
      pose.distal[si] = end;
    }
  }
  return pose;
}

std::vector<int> canonical_indices(const SkeletonModel& model) {
  std::vector<int> out;
  for (const auto& s : model.segments()) {
    // Closest to the set's mean direction; a balanced set (a full fan) keeps index 0.
    Vec3 axis = s.orientations.front();
    Vec3 mean = Vec3::Zero();
    for (const auto& d : s.orientations) mean += d;
    if (mean.norm() > 1e-9) axis = mean.normalized();
    int best = 0;
    double best_dot = -2.0;
    for (std::size_t i = 0; i < s.orientations.size(); ++i) {
      const double d = s.orientations[i].dot(axis);
      if (d > best_dot + 1e-12) {
        best_dot = d;
        best = static_cast<int>(i);
      }
    }
    out.push_back(best);
  }
  return out;
}

TransformFamily make_lambda_family(const Space& grid, const SegmentSpec& segment) {
  TransformFamily family;
  const bool derived = segment.displacements.size() != segment.orientations.size();
  for (std::size_t i = 0; i < segment.orientations.size(); ++i) {
    const Voxel d = derived ? displacement_for(segment.orientations[i], segment.length)
                            : segment.displacements[i];
    family.add(std::make_shared<GridShift>(grid, d, segment.name + "[" + std::to_string(i) + "]"));
  }
  return family;
}

}  // namespace msc::kinematics
