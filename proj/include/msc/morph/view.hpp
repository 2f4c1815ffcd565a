#pragma once

#include <vector>

#include <Eigen/Core>

#include "msc/core/grid_transforms.hpp"
#include "msc/core/stage.hpp"

namespace msc::morph {

// Body frame: x to the right, y down the image rows, z is depth (the
// projection axis). Azimuth turns about y, taking +x toward -z; elevation
// then turns about x, taking +y toward +z. Both rotate about the grid centre.
struct ViewAngles {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;

  friend bool operator==(const ViewAngles&, const ViewAngles&) = default;
};

Eigen::Matrix3d view_rotation(const ViewAngles& view);

struct ViewFamilySpec {
  std::vector<double> azimuths{0.0};
  std::vector<double> elevations{0.0};

  // Throws ConfigError when a list is empty, has duplicates, or (0,0) is missing.
  void validate() const;
  // Azimuth-major enumeration.
  std::vector<ViewAngles> views() const;
  std::size_t identity_index() const;
};

// Rigid rotation of a voxel field, nearest-voxel resampling.
AffineNearestMap make_view_rotation(const Space& grid, const ViewAngles& view);
Field rotate_view(const Field& voxels, const ViewAngles& view);

// Sums voxel weights along depth. The adjoint copies each pixel down its column.
class OrthographicProjection final : public Transform {
 public:
  explicit OrthographicProjection(Space grid);

  const Space& input_space() const noexcept override { return grid_; }
  const Space& output_space() const noexcept override { return image_; }
  std::string label() const override { return "project"; }

 protected:
  Field do_apply(const Field& in, const Field* relevant) const override;
  Field do_adjoint(const Field& in) const override;

 private:
  Space grid_;
  Space image_;
};

Field project_ortho(const Field& voxels);

// Segment hypotheses seen from a view. Forward (analysis) direction maps a
// view-frame pair field to body-frame pairs by looking each body pair up at
// its rotated location; the adjoint scatters body pairs into the view frame.
// The forward direction needs a relevance field.
class PairViewRotation final : public Transform {
 public:
  PairViewRotation(Space pairs, const ViewAngles& view);

  const Space& input_space() const noexcept override { return pairs_; }
  const Space& output_space() const noexcept override { return pairs_; }
  std::string label() const override;
  const ViewAngles& view() const noexcept { return view_; }

  // Rotated pair key, or nothing if either endpoint leaves the grid.
  std::optional<CellKey> rotate_key(CellKey body_key) const noexcept;

 protected:
  Field do_apply(const Field& in, const Field* relevant) const override;
  Field do_adjoint(const Field& in) const override;

 private:
  Space pairs_;
  Space voxels_;
  ViewAngles view_;
  AffineNearestMap rotation_;
};

TransformFamily make_pair_view_family(const Space& pairs, const ViewFamilySpec& spec);

}  // namespace msc::morph
