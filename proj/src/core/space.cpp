#include "msc/core/space.hpp"

#include <sstream>

#include "msc/core/errors.hpp"

namespace msc {

namespace {

void require_positive(int nx, int ny, int nz) {
  if (nx <= 0 || ny <= 0 || nz <= 0) throw ContractError("space dimensions must be positive");
}

}  // namespace

Space Space::grid2d(int width, int height) {
  require_positive(width, height, 1);
  Space s;
  s.kind_ = SpaceKind::grid2d;
  s.nx_ = width;
  s.ny_ = height;
  s.nz_ = 1;
  return s;
}

Space Space::grid3d(int nx, int ny, int nz) {
  require_positive(nx, ny, nz);
  Space s;
  s.kind_ = SpaceKind::grid3d;
  s.nx_ = nx;
  s.ny_ = ny;
  s.nz_ = nz;
  return s;
}

Space Space::segment_pairs(int nx, int ny, int nz, int segments) {
  require_positive(nx, ny, nz);
  if (segments <= 0) throw ContractError("segment_pairs space needs at least one segment");
  Space s;
  s.kind_ = SpaceKind::segment_pairs;
  s.nx_ = nx;
  s.ny_ = ny;
  s.nz_ = nz;
  s.segments_ = segments;
  return s;
}

std::uint64_t Space::voxel_count() const noexcept {
  return static_cast<std::uint64_t>(nx_) * static_cast<std::uint64_t>(ny_) *
         static_cast<std::uint64_t>(nz_);
}

std::uint64_t Space::key_count() const noexcept {
  if (kind_ != SpaceKind::segment_pairs) return voxel_count();
  const auto v = voxel_count();
  return static_cast<std::uint64_t>(segments_) * v * v;
}

Voxel Space::voxel(CellKey key) const noexcept {
  const auto nx = static_cast<CellKey>(nx_);
  const auto ny = static_cast<CellKey>(ny_);
  Voxel v;
  v.x = static_cast<int>(key % nx);
  key /= nx;
  v.y = static_cast<int>(key % ny);
  v.z = static_cast<int>(key / ny);
  return v;
}

CellKey Space::pair_key(int segment, Voxel proximal, Voxel distal) const noexcept {
  const auto v = voxel_count();
  return (static_cast<CellKey>(segment) * v + key(proximal)) * v + key(distal);
}

SegmentPair Space::pair(CellKey k) const noexcept {
  const auto v = voxel_count();
  SegmentPair p;
  p.distal = voxel(k % v);
  k /= v;
  p.proximal = voxel(k % v);
  p.segment = static_cast<int>(k / v);
  return p;
}

int Space::pair_segment(CellKey k) const noexcept {
  const auto v = voxel_count();
  return static_cast<int>(k / v / v);
}

Space Space::voxel_space() const noexcept {
  Space s = *this;
  s.kind_ = nz_ == 1 && kind_ == SpaceKind::grid2d ? SpaceKind::grid2d : SpaceKind::grid3d;
  s.segments_ = 0;
  return s;
}

std::string Space::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::grid2d: os << "grid2d(" << nx_ << "x" << ny_ << ")"; break;
    case SpaceKind::grid3d: os << "grid3d(" << nx_ << "x" << ny_ << "x" << nz_ << ")"; break;
    case SpaceKind::segment_pairs:
      os << "segment_pairs(" << segments_ << " over " << nx_ << "x" << ny_ << "x" << nz_ << ")";
      break;
  }
  return os.str();
}

}  // namespace msc
