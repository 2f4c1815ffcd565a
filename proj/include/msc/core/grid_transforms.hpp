#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "msc/core/transform.hpp"

namespace msc {

// Integer displacement on a grid space. Cells pushed out of the grid are dropped.
class GridShift final : public Transform {
 public:
  GridShift(Space space, Voxel offset, std::string label = {});

  const Space& input_space() const noexcept override { return space_; }
  const Space& output_space() const noexcept override { return space_; }
  std::string label() const override;
  Voxel offset() const noexcept { return offset_; }

 protected:
  Field do_apply(const Field& in, const Field* relevant) const override;
  Field do_adjoint(const Field& in) const override;

 private:
  Field shifted(const Field& in, Voxel by) const;

  Space space_;
  Voxel offset_;
  std::string label_;
};

// Affine cell map x -> linear*(x - center) + center + translation, resampled
// to the nearest cell (rounding halves up). The forward map scatters each
// source cell to one destination; the adjoint gathers every source cell whose
// image rounds to the queried destination, which makes it the exact transpose.
//
// Resampling::sum adds colliding sources, conserving total weight.
// Resampling::balanced scales each source by 1/sqrt(k), k the number of grid
// cells sharing its destination, so a contracting map does not gain norm
// (and correspondence) merely by piling cells together.
enum class Resampling { sum, balanced };

class AffineNearestMap final : public Transform {
 public:
  AffineNearestMap(Space space, const Eigen::Matrix3d& linear, const Eigen::Vector3d& center,
                   const Eigen::Vector3d& translation, std::string label,
                   Resampling resampling = Resampling::sum);

  const Space& input_space() const noexcept override { return space_; }
  const Space& output_space() const noexcept override { return space_; }
  std::string label() const override { return label_; }

  // Destination of a source cell, possibly outside the grid.
  Voxel map_cell(Voxel source) const noexcept;

 protected:
  Field do_apply(const Field& in, const Field* relevant) const override;
  Field do_adjoint(const Field& in) const override;

 private:
  Space space_;
  Eigen::Matrix3d linear_;
  Eigen::Matrix3d inverse_;
  Eigen::Vector3d center_;
  Eigen::Vector3d translation_;
  double search_radius_ = 0.0;
  std::string label_;
  // Per-source weight, indexed by source key; empty for Resampling::sum.
  std::vector<double> source_weight_;
};

// Rounds half up; shared by every nearest-cell resampler.
inline int round_half_up(double v) noexcept { return static_cast<int>(std::floor(v + 0.5)); }

Voxel round_to_voxel(const Eigen::Vector3d& p) noexcept;

}  // namespace msc

namespace msc {

// Centre cell used by rotations and scalings: (floor(nx/2), floor(ny/2), floor(nz/2)).
Eigen::Vector3d grid_center(const Space& space) noexcept;

// Swaps a transform's two directions, so a map written in the rendering
// direction can serve as a stage in the analysis direction.
class Transposed final : public Transform {
 public:
  explicit Transposed(TransformPtr inner);

  const Space& input_space() const noexcept override { return inner_->output_space(); }
  const Space& output_space() const noexcept override { return inner_->input_space(); }
  std::string label() const override { return inner_->label() + "^T"; }

 protected:
  Field do_apply(const Field& in, const Field*) const override { return inner_->adjoint(in); }
  Field do_adjoint(const Field& in) const override { return inner_->apply(in); }

 private:
  TransformPtr inner_;
};

}  // namespace msc
