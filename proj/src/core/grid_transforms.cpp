#include "msc/core/grid_transforms.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include "msc/core/errors.hpp"

namespace msc {

Voxel round_to_voxel(const Eigen::Vector3d& p) noexcept {
  return {round_half_up(p.x()), round_half_up(p.y()), round_half_up(p.z())};
}

GridShift::GridShift(Space space, Voxel offset, std::string label)
    : space_(space), offset_(offset), label_(std::move(label)) {
  if (!space.is_grid()) throw ContractError("GridShift needs a grid space");
  if (space.kind() == SpaceKind::grid2d && offset.z != 0)
    throw ContractError("GridShift on a 2D grid cannot move in z");
}

std::string GridShift::label() const {
  if (!label_.empty()) return label_;
  return "shift(" + std::to_string(offset_.x) + "," + std::to_string(offset_.y) +
         (space_.kind() == SpaceKind::grid3d ? "," + std::to_string(offset_.z) : "") + ")";
}

Field GridShift::shifted(const Field& in, Voxel by) const {
  // Every surviving key moves by the same amount, so order is preserved.
  std::vector<Entry> out;
  out.reserve(in.size());
  for (const auto& e : in.entries()) {
    const Voxel v = space_.voxel(e.key) + by;
    if (space_.contains(v)) out.push_back({space_.key(v), e.weight});
  }
  return Field::from_entries(space_, std::move(out));
}

Field GridShift::do_apply(const Field& in, const Field*) const { return shifted(in, offset_); }

Field GridShift::do_adjoint(const Field& in) const {
  return shifted(in, Voxel{} - offset_);
}

AffineNearestMap::AffineNearestMap(Space space, const Eigen::Matrix3d& linear,
                                   const Eigen::Vector3d& center,
                                   const Eigen::Vector3d& translation, std::string label,
                                   Resampling resampling)
    : space_(space),
      linear_(linear),
      center_(center),
      translation_(translation),
      label_(std::move(label)) {
  if (!space.is_grid()) throw ContractError("AffineNearestMap needs a grid space");
  if (space.kind() == SpaceKind::grid2d) {
    linear_.row(2) = Eigen::RowVector3d(0, 0, 1);
    linear_.col(2) = Eigen::Vector3d(0, 0, 1);
    center_.z() = 0.0;
    translation_.z() = 0.0;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(linear_);
  if (!lu.isInvertible()) throw ContractError(label_ + ": linear part is singular");
  inverse_ = lu.inverse();
  // Preimages of a destination cell lie within |inverse| * half-diagonal of
  // the back-mapped centre; the spectral norm bounds the stretch.
  const double stretch = Eigen::JacobiSVD<Eigen::Matrix3d>(inverse_).singularValues()(0);
  const double dims = space.kind() == SpaceKind::grid2d ? 2.0 : 3.0;
  search_radius_ = stretch * std::sqrt(dims) * 0.5 + 1e-9;

  if (resampling == Resampling::balanced) {
    const auto cells = space_.voxel_count();
    std::vector<int> hits(cells, 0);
    std::vector<std::int64_t> target(cells, -1);
    for (CellKey k = 0; k < cells; ++k) {
      const Voxel d = map_cell(space_.voxel(k));
      if (!space_.contains(d)) continue;
      target[k] = static_cast<std::int64_t>(space_.key(d));
      ++hits[static_cast<std::size_t>(target[k])];
    }
    source_weight_.assign(cells, 1.0);
    for (CellKey k = 0; k < cells; ++k)
      if (target[k] >= 0)
        source_weight_[k] = 1.0 / std::sqrt(static_cast<double>(hits[static_cast<std::size_t>(target[k])]));
  }
}

Voxel AffineNearestMap::map_cell(Voxel s) const noexcept {
  const Eigen::Vector3d p(s.x, s.y, s.z);
  return round_to_voxel(linear_ * (p - center_) + center_ + translation_);
}

Field AffineNearestMap::do_apply(const Field& in, const Field*) const {
  FieldBuilder builder(space_);
  builder.reserve(in.size());
  for (const auto& e : in.entries()) {
    const Voxel d = map_cell(space_.voxel(e.key));
    if (space_.contains(d))
      builder.add(space_.key(d), source_weight_.empty() ? e.weight : e.weight * source_weight_[e.key]);
  }
  return builder.build();
}

Field AffineNearestMap::do_adjoint(const Field& in) const {
  FieldBuilder builder(space_);
  builder.reserve(in.size() * 2);
  const bool flat = space_.kind() == SpaceKind::grid2d;
  for (const auto& e : in.entries()) {
    const Voxel d = space_.voxel(e.key);
    const Eigen::Vector3d target(d.x, d.y, d.z);
    const Eigen::Vector3d back = inverse_ * (target - center_ - translation_) + center_;
    const int x0 = static_cast<int>(std::ceil(back.x() - search_radius_));
    const int x1 = static_cast<int>(std::floor(back.x() + search_radius_));
    const int y0 = static_cast<int>(std::ceil(back.y() - search_radius_));
    const int y1 = static_cast<int>(std::floor(back.y() + search_radius_));
    const int z0 = flat ? 0 : static_cast<int>(std::ceil(back.z() - search_radius_));
    const int z1 = flat ? 0 : static_cast<int>(std::floor(back.z() + search_radius_));
    for (int z = z0; z <= z1; ++z)
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const Voxel s{x, y, z};
          if (!space_.contains(s) || map_cell(s) != d) continue;
          const CellKey k = space_.key(s);
          builder.add(k, source_weight_.empty() ? e.weight : e.weight * source_weight_[k]);
        }
  }
  return builder.build();
}

}  // namespace msc

namespace msc {

Eigen::Vector3d grid_center(const Space& space) noexcept {
  return {static_cast<double>(space.nx() / 2), static_cast<double>(space.ny() / 2),
          static_cast<double>(space.nz() / 2)};
}

Transposed::Transposed(TransformPtr inner) : inner_(std::move(inner)) {
  if (!inner_) throw ContractError("null transform");
}

}  // namespace msc
