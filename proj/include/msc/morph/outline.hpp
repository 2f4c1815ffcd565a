#pragma once

#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "msc/core/transform.hpp"
#include "msc/kinematics/skeleton.hpp"

namespace msc::morph {

struct PixelOffset {
  int dx = 0;
  int dy = 0;

  friend bool operator==(const PixelOffset&, const PixelOffset&) = default;
};

// Cells of a capsule outline around the segment from (0,0) to (ax,ay), as
// offsets from the start point, in row-major order. Cells whose distance to
// the axis lies in [h-0.5, h+0.5] are kept; for h < 1 the axis itself
// (distance <= 0.5) is drawn instead.
std::vector<PixelOffset> capsule_outline(int ax, int ay, double half_width);

// Weight of each cell of an outline with `cells` cells: the outline has unit
// L2 norm, so a hypothesis cannot outscore its own shape by being wider.
double outline_weight(std::size_t cells) noexcept;

// Outline of one segment hypothesis given its view-frame endpoints. Cells
// outside the image are dropped (the weight still counts them).
Field morph_project_segment(const Space& image, Voxel proximal, Voxel distal, double half_width);

struct MorphVariant {
  int segment = 0;
  double width_scale = 1.0;
};

// One morph variant of one segment. Analysis direction: image to view-frame
// pair keys of that segment, scoring each relevant hypothesis by the image
// weight under its outline. The adjoint renders the hypotheses' outlines.
class SegmentMorph final : public Transform {
 public:
  SegmentMorph(Space image, Space pairs, int segment, double half_width, std::string label);

  const Space& input_space() const noexcept override { return image_; }
  const Space& output_space() const noexcept override { return pairs_; }
  std::string label() const override { return label_; }
  int segment() const noexcept { return segment_; }
  double half_width() const noexcept { return half_width_; }

 protected:
  Field do_apply(const Field& in, const Field* relevant) const override;
  Field do_adjoint(const Field& in) const override;

 private:
  const std::vector<PixelOffset>& outline(int ax, int ay) const;

  Space image_;
  Space pairs_;
  int segment_;
  double half_width_;
  std::string label_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::int64_t, std::vector<PixelOffset>> cache_;
};

// Members grouped by segment: group s holds segment s's variants, in the
// order given. widths[s] lists width scales applied to the segment's base width.
TransformFamily build_morph_family(const kinematics::SkeletonModel& model, const Space& image,
                                   const Space& pairs,
                                   const std::vector<std::vector<double>>& width_scales);

// Sum of every segment's outline at the given widths (view-frame endpoints).
Field render_figure(const Space& image, std::span<const Voxel> proximal,
                    std::span<const Voxel> distal, std::span<const double> half_widths);

}  // namespace msc::morph
