#pragma once

#include <optional>
#include <span>
#include <vector>

#include "msc/core/mask.hpp"
#include "msc/core/transform.hpp"

namespace msc {

struct GainRule {
  double threshold = 1e-3;
  // q within this relative distance of the group maximum counts as tied.
  double tie_tolerance = 1e-9;
};

// One layer of a circuit: a transform family, its gains and last
// correspondences, a competition rate and an optional mask on its output space.
class Stage {
 public:
  explicit Stage(TransformFamily family, double rate = 0.1);

  const TransformFamily& family() const noexcept { return family_; }
  std::size_t size() const noexcept { return family_.size(); }

  std::span<const double> gains() const noexcept { return gains_; }
  std::span<const double> correspondences() const noexcept { return q_; }
  double gain(std::size_t i) const { return gains_.at(i); }
  double correspondence(std::size_t i) const { return q_.at(i); }

  double rate() const noexcept { return rate_; }
  void set_rate(double rate);

  const std::optional<MaskField>& mask() const noexcept { return mask_; }
  void set_mask(std::optional<MaskField> mask);

  std::size_t live_count() const noexcept;
  std::size_t live_count(int group) const;
  // Per group: the single live member, or -1 if zero or several are live.
  std::vector<int> survivors() const;
  // Per group: live member with the largest gain (ties: larger q, then lower index), or -1.
  std::vector<int> leaders() const;

  void reset_gains();
  void set_gains(std::vector<double> gains);
  void set_correspondence(std::size_t i, double q) { q_.at(i) = q; }
  void clear_correspondences();
  void kill(std::size_t i) { gains_.at(i) = 0.0; }

  // Competition step. Within each group, gains move by -rate*(1 - q/max q),
  // clamp at zero and drop to zero below the threshold. A group whose
  // correspondences are all zero collapses. Returns true if any gain changed.
  bool update_gains(const GainRule& rule);

 private:
  TransformFamily family_;
  std::vector<double> gains_;
  std::vector<double> q_;
  double rate_;
  std::optional<MaskField> mask_;
};

}  // namespace msc
