#include "msc/visual/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "msc/core/errors.hpp"
#include "msc/core/grid_transforms.hpp"

namespace msc::visual {

namespace {

constexpr double kIdentityTolerance = 1e-12;

template <typename T>
std::size_t find_identity(const std::vector<T>& values, const T& identity, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::abs(values[i] - identity) <= kIdentityTolerance) return i;
  throw ConfigError(std::string(what) + " list has no identity member");
}

void require_increasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " list is empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " must be strictly increasing");
}

Eigen::Vector3d center_of(const Space& space, const VisualFamilySpec& spec) {
  if (spec.center) return {spec.center->x(), spec.center->y(), 0.0};
  return grid_center(space);
}

void require_grid2d(const Space& space) {
  if (space.kind() != SpaceKind::grid2d) throw ContractError("visual families need a 2D grid");
}

std::string number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void VisualFamilySpec::validate() const {
  if (shifts.empty()) throw ConfigError("shift list is empty");
  std::set<Offset2> seen(shifts.begin(), shifts.end());
  if (seen.size() != shifts.size()) throw ConfigError("shift list has duplicates");
  identity_shift();
  require_increasing(scales, "scale");
  if (scales.front() <= 0.0) throw ConfigError("scales must be positive");
  identity_scale();
  require_increasing(rotations_deg, "rotation");
  identity_rotation();
}

std::size_t VisualFamilySpec::identity_shift() const {
  const auto it = std::find(shifts.begin(), shifts.end(), Offset2{0, 0});
  if (it == shifts.end()) throw ConfigError("shift list has no identity member");
  return static_cast<std::size_t>(it - shifts.begin());
}

std::size_t VisualFamilySpec::identity_scale() const { return find_identity(scales, 1.0, "scale"); }

std::size_t VisualFamilySpec::identity_rotation() const {
  return find_identity(rotations_deg, 0.0, "rotation");
}

std::vector<Offset2> shift_window(int x0, int x1, int y0, int y1) {
  if (x1 < x0 || y1 < y0) throw ConfigError("empty shift window");
  std::vector<Offset2> out;
  out.reserve(static_cast<std::size_t>(x1 - x0 + 1) * static_cast<std::size_t>(y1 - y0 + 1));
  for (int dy = y0; dy <= y1; ++dy)
    for (int dx = x0; dx <= x1; ++dx) out.push_back({dx, dy});
  return out;
}

std::vector<double> geometric_ladder(double step, int below, int above) {
  if (!(step > 1.0) || below < 0 || above < 0) throw ConfigError("invalid geometric ladder");
  std::vector<double> out;
  for (int k = -below; k <= above; ++k) out.push_back(k == 0 ? 1.0 : std::pow(step, k));
  return out;
}

std::vector<double> uniform_angles(double step_deg, int below, int above) {
  if (!(step_deg > 0.0) || below < 0 || above < 0) throw ConfigError("invalid angle ladder");
  std::vector<double> out;
  for (int k = -below; k <= above; ++k) out.push_back(k * step_deg);
  return out;
}

TransformFamily make_shift_family(const Space& space, const VisualFamilySpec& spec) {
  require_grid2d(space);
  TransformFamily family;
  for (const auto& s : spec.shifts) family.add(std::make_shared<GridShift>(space, Voxel{s.dx, s.dy, 0}));
  return family;
}

TransformFamily make_scale_family(const Space& space, const VisualFamilySpec& spec) {
  require_grid2d(space);
  const auto c = center_of(space, spec);
  TransformFamily family;
  for (double f : spec.scales) {
    if (f == 1.0) {
      family.add(std::make_shared<GridShift>(space, Voxel{}, "scale(1)"));
      continue;
    }
    family.add(std::make_shared<AffineNearestMap>(space, Eigen::Matrix3d::Identity() * f, c,
                                                  Eigen::Vector3d::Zero(),
                                                  "scale(" + number(f) + ")", spec.resampling));
  }
  return family;
}

TransformFamily make_rot2d_family(const Space& space, const VisualFamilySpec& spec) {
  require_grid2d(space);
  const auto c = center_of(space, spec);
  TransformFamily family;
  for (double deg : spec.rotations_deg) {
    if (deg == 0.0) {
      family.add(std::make_shared<GridShift>(space, Voxel{}, "rot2d(0)"));
      continue;
    }
    const double a = deg * std::numbers::pi / 180.0;
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = std::cos(a);
    m(0, 1) = -std::sin(a);
    m(1, 0) = std::sin(a);
    m(1, 1) = std::cos(a);
    family.add(std::make_shared<AffineNearestMap>(space, m, c, Eigen::Vector3d::Zero(),
                                                  "rot2d(" + number(deg) + ")", spec.resampling));
  }
  return family;
}

VisualFamilies VisualFamilies::build(const Space& space, const VisualFamilySpec& spec) {
  spec.validate();
  return {make_shift_family(space, spec), make_scale_family(space, spec),
          make_rot2d_family(space, spec)};
}

std::vector<Stage> make_visual_stages(const VisualFamilies& families, double rate) {
  std::vector<Stage> stages;
  stages.emplace_back(families.shift, rate);
  stages.emplace_back(families.scale, rate);
  stages.emplace_back(families.rotation, rate);
  return stages;
}

VisualFamilySpec family_spec_from_json(const nlohmann::json& j) {
  VisualFamilySpec spec;
  try {
    if (j.contains("shifts")) {
      const auto& s = j.at("shifts");
      spec.shifts.clear();
      if (s.is_object()) {
        const auto dx = s.at("dx").get<std::vector<int>>();
        const auto dy = s.at("dy").get<std::vector<int>>();
        if (dx.size() != 2 || dy.size() != 2) throw ConfigError("shift ranges need [lo, hi]");
        spec.shifts = shift_window(dx[0], dx[1], dy[0], dy[1]);
      } else {
        for (const auto& p : s) spec.shifts.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
      }
    }
    if (j.contains("scales")) spec.scales = j.at("scales").get<std::vector<double>>();
    if (j.contains("rotations_deg"))
      spec.rotations_deg = j.at("rotations_deg").get<std::vector<double>>();
    if (j.contains("center")) {
      const auto c = j.at("center").get<std::vector<double>>();
      if (c.size() != 2) throw ConfigError("center needs two coordinates");
      spec.center = Eigen::Vector2d(c[0], c[1]);
    }
    if (j.contains("resampling")) {
      const auto r = j.at("resampling").get<std::string>();
      if (r == "sum")
        spec.resampling = Resampling::sum;
      else if (r == "balanced")
        spec.resampling = Resampling::balanced;
      else
        throw ConfigError("resampling must be \"sum\" or \"balanced\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("visual family spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json to_json(const VisualFamilySpec& spec) {
  nlohmann::ordered_json j;
  auto shifts = nlohmann::ordered_json::array();
  for (const auto& s : spec.shifts) shifts.push_back({s.dx, s.dy});
  j["shifts"] = shifts;
  j["scales"] = spec.scales;
  j["rotations_deg"] = spec.rotations_deg;
  if (spec.center) j["center"] = {spec.center->x(), spec.center->y()};
  if (spec.resampling == Resampling::balanced) j["resampling"] = "balanced";
  return j;
}

}  // namespace msc::visual
