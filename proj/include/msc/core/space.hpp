#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace msc {

using CellKey = std::uint64_t;

struct Voxel {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Voxel&, const Voxel&) = default;
  friend Voxel operator+(Voxel a, Voxel b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Voxel operator-(Voxel a, Voxel b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
};

enum class SpaceKind : std::uint8_t { grid2d, grid3d, segment_pairs };

// A (segment, proximal voxel, distal voxel) hypothesis decoded from a pair key.
struct SegmentPair {
  int segment = 0;
  Voxel proximal;
  Voxel distal;
};

// Describes which cells a field may address and how cells map to integer keys.
//
// grid2d:        key = y*nx + x                      (nz == 1)
// grid3d:        key = (z*ny + y)*nx + x
// segment_pairs: key = (s*V + proximal)*V + distal  with V = nx*ny*nz
//
// Keys are ordered, so sorted entry vectors give a deterministic layout.
class Space {
 public:
  constexpr Space() = default;

  static Space grid2d(int width, int height);
  static Space grid3d(int nx, int ny, int nz);
  static Space segment_pairs(int nx, int ny, int nz, int segments);

  SpaceKind kind() const noexcept { return kind_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }
  int segments() const noexcept { return segments_; }

  bool is_grid() const noexcept { return kind_ != SpaceKind::segment_pairs; }
  std::uint64_t voxel_count() const noexcept;
  // Number of addressable keys.
  std::uint64_t key_count() const noexcept;

  bool contains(int x, int y, int z = 0) const noexcept {
    return x >= 0 && y >= 0 && z >= 0 && x < nx_ && y < ny_ && z < nz_;
  }
  bool contains(Voxel v) const noexcept { return contains(v.x, v.y, v.z); }

  // Grid keys. Precondition: contains(...).
  CellKey key(int x, int y, int z = 0) const noexcept {
    return (static_cast<CellKey>(z) * static_cast<CellKey>(ny_) + static_cast<CellKey>(y)) *
               static_cast<CellKey>(nx_) +
           static_cast<CellKey>(x);
  }
  CellKey key(Voxel v) const noexcept { return key(v.x, v.y, v.z); }
  Voxel voxel(CellKey key) const noexcept;

  // Pair keys (segment_pairs only).
  CellKey pair_key(int segment, Voxel proximal, Voxel distal) const noexcept;
  SegmentPair pair(CellKey key) const noexcept;
  int pair_segment(CellKey key) const noexcept;

  // The grid3d space sharing this space's voxel dimensions.
  Space voxel_space() const noexcept;

  std::string describe() const;

  friend bool operator==(const Space&, const Space&) = default;

 private:
  SpaceKind kind_ = SpaceKind::grid2d;
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 1;
  int segments_ = 0;
};

}  // namespace msc
