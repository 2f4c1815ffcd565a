#include "msc/morph/view.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "msc/core/errors.hpp"

namespace msc::morph {

namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::string view_label(const ViewAngles& v) {
  std::ostringstream os;
  os << "view(" << v.azimuth_deg << "," << v.elevation_deg << ")";
  return os.str();
}

void check_list(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw ConfigError(std::string("view family: empty ") + what + " list");
  std::set<double> seen;
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError(std::string("view family: non-finite ") + what);
    if (!seen.insert(v).second)
      throw ConfigError(std::string("view family: duplicate ") + what);
  }
  if (!seen.contains(0.0))
    throw ConfigError(std::string("view family: ") + what + " list must contain 0");
}

}  // namespace

Eigen::Matrix3d view_rotation(const ViewAngles& view) {
  // Azimuth about y with +x going to -z is a standard right-handed turn;
  // elevation about x with +y going to +z likewise.
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(radians(view.azimuth_deg), Eigen::Vector3d::UnitY())
                                 .toRotationMatrix();
  const Eigen::Matrix3d rx =
      Eigen::AngleAxisd(radians(view.elevation_deg), Eigen::Vector3d::UnitX()).toRotationMatrix();
  Eigen::Matrix3d m = rx * ry;
  // Snap round-off so quarter turns are exact.
  for (int i = 0; i < 9; ++i)
    if (std::abs(m.data()[i]) < 1e-12) m.data()[i] = 0.0;
  return m;
}

void ViewFamilySpec::validate() const {
  check_list(azimuths, "azimuth");
  check_list(elevations, "elevation");
}

std::vector<ViewAngles> ViewFamilySpec::views() const {
  std::vector<ViewAngles> out;
  out.reserve(azimuths.size() * elevations.size());
  for (double az : azimuths)
    for (double el : elevations) out.push_back({az, el});
  return out;
}

std::size_t ViewFamilySpec::identity_index() const {
  const auto all = views();
  const auto it = std::find(all.begin(), all.end(), ViewAngles{});
  if (it == all.end()) throw ConfigError("view family has no identity view");
  return static_cast<std::size_t>(it - all.begin());
}

AffineNearestMap make_view_rotation(const Space& grid, const ViewAngles& view) {
  if (grid.kind() != SpaceKind::grid3d) throw ContractError("view rotation needs a 3D grid");
  return AffineNearestMap(grid, view_rotation(view), grid_center(grid), Eigen::Vector3d::Zero(),
                          view_label(view));
}

Field rotate_view(const Field& voxels, const ViewAngles& view) {
  return make_view_rotation(voxels.space(), view).apply(voxels);
}

OrthographicProjection::OrthographicProjection(Space grid)
    : grid_(grid), image_(Space::grid2d(grid.nx(), grid.ny())) {
  if (grid.kind() != SpaceKind::grid3d) throw ContractError("projection needs a 3D grid");
}

Field OrthographicProjection::do_apply(const Field& in, const Field*) const {
  FieldBuilder builder(image_);
  builder.reserve(in.size());
  for (const auto& e : in.entries()) {
    const Voxel v = grid_.voxel(e.key);
    builder.add(image_.key(v.x, v.y), e.weight);
  }
  return builder.build();
}

Field OrthographicProjection::do_adjoint(const Field& in) const {
  std::vector<Entry> out;
  out.reserve(in.size() * static_cast<std::size_t>(grid_.nz()));
  for (int z = 0; z < grid_.nz(); ++z)
    for (const auto& e : in.entries()) {
      const Voxel p = image_.voxel(e.key);
      out.push_back({grid_.key(p.x, p.y, z), e.weight});
    }
  // Keys ascend with z in the outer loop, so this is already canonical.
  return Field::from_entries(grid_, std::move(out));
}

Field project_ortho(const Field& voxels) {
  return OrthographicProjection(voxels.space()).apply(voxels);
}

PairViewRotation::PairViewRotation(Space pairs, const ViewAngles& view)
    : pairs_(pairs),
      voxels_(pairs.voxel_space()),
      view_(view),
      rotation_(make_view_rotation(pairs.voxel_space(), view)) {
  if (pairs.kind() != SpaceKind::segment_pairs)
    throw ContractError("pair view rotation needs a segment-pair space");
}

std::string PairViewRotation::label() const { return view_label(view_); }

std::optional<CellKey> PairViewRotation::rotate_key(CellKey body_key) const noexcept {
  const SegmentPair p = pairs_.pair(body_key);
  const Voxel a = rotation_.map_cell(p.proximal);
  const Voxel b = rotation_.map_cell(p.distal);
  if (!voxels_.contains(a) || !voxels_.contains(b)) return std::nullopt;
  return pairs_.pair_key(p.segment, a, b);
}

Field PairViewRotation::do_apply(const Field& in, const Field* relevant) const {
  if (relevant == nullptr)
    throw ContractError(label() + ": pair-keyed transforms need a relevance field");
  std::vector<Entry> out;
  out.reserve(relevant->size());
  for (const auto& e : relevant->entries()) {
    const auto k = rotate_key(e.key);
    if (!k) continue;
    const double w = in.weight(*k);
    if (w > 0.0) out.push_back({e.key, w});
  }
  return Field::from_entries(pairs_, std::move(out));
}

Field PairViewRotation::do_adjoint(const Field& in) const {
  FieldBuilder builder(pairs_);
  builder.reserve(in.size());
  for (const auto& e : in.entries())
    if (const auto k = rotate_key(e.key)) builder.add(*k, e.weight);
  return builder.build();
}

TransformFamily make_pair_view_family(const Space& pairs, const ViewFamilySpec& spec) {
  spec.validate();
  TransformFamily family;
  for (const auto& v : spec.views()) family.add(std::make_shared<PairViewRotation>(pairs, v));
  return family;
}

}  // namespace msc::morph
