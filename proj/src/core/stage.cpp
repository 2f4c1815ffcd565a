#include "msc/core/stage.hpp"

#include <algorithm>

#include "msc/core/errors.hpp"

namespace msc {

Stage::Stage(TransformFamily family, double rate)
    : family_(std::move(family)),
      gains_(family_.size(), 1.0),
      q_(family_.size(), 0.0),
      rate_(rate) {
  if (family_.empty()) throw ContractError("stage needs a nonempty transform family");
  set_rate(rate);
}

void Stage::set_rate(double rate) {
  if (!(rate > 0.0)) throw ContractError("competition rate must be positive");
  rate_ = rate;
}

void Stage::set_mask(std::optional<MaskField> mask) {
  if (mask && mask->space() != family_.output_space())
    throw ContractError("stage mask must live on the stage's output space");
  mask_ = std::move(mask);
}

std::size_t Stage::live_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(gains_.begin(), gains_.end(),
                                                [](double g) { return g > 0.0; }));
}

std::size_t Stage::live_count(int group) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < gains_.size(); ++i)
    if (family_.group(i) == group && gains_[i] > 0.0) ++n;
  return n;
}

std::vector<int> Stage::survivors() const {
  std::vector<int> out(static_cast<std::size_t>(family_.group_count()), -1);
  std::vector<int> count(out.size(), 0);
  for (std::size_t i = 0; i < gains_.size(); ++i) {
    if (gains_[i] <= 0.0) continue;
    const auto g = static_cast<std::size_t>(family_.group(i));
    if (count[g]++ == 0) out[g] = static_cast<int>(i);
  }
  for (std::size_t g = 0; g < out.size(); ++g)
    if (count[g] != 1) out[g] = -1;
  return out;
}

std::vector<int> Stage::leaders() const {
  std::vector<int> out(static_cast<std::size_t>(family_.group_count()), -1);
  for (std::size_t i = 0; i < gains_.size(); ++i) {
    if (gains_[i] <= 0.0) continue;
    auto& best = out[static_cast<std::size_t>(family_.group(i))];
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const auto b = static_cast<std::size_t>(best);
    if (gains_[i] > gains_[b] || (gains_[i] == gains_[b] && q_[i] > q_[b]))
      best = static_cast<int>(i);
  }
  return out;
}

void Stage::reset_gains() {
  std::fill(gains_.begin(), gains_.end(), 1.0);
  clear_correspondences();
}

void Stage::set_gains(std::vector<double> gains) {
  if (gains.size() != gains_.size()) throw ContractError("gain vector size mismatch");
  for (double g : gains)
    if (!(g >= 0.0)) throw ContractError("gains must be nonnegative");
  gains_ = std::move(gains);
}

void Stage::clear_correspondences() { std::fill(q_.begin(), q_.end(), 0.0); }

bool Stage::update_gains(const GainRule& rule) {
  std::vector<double> max_q(static_cast<std::size_t>(family_.group_count()), 0.0);
  for (std::size_t i = 0; i < q_.size(); ++i) {
    auto& m = max_q[static_cast<std::size_t>(family_.group(i))];
    m = std::max(m, q_[i]);
  }
  bool changed = false;
  for (std::size_t i = 0; i < gains_.size(); ++i) {
    const double before = gains_[i];
    if (before == 0.0) continue;
    const double m = max_q[static_cast<std::size_t>(family_.group(i))];
    double g = 0.0;
    if (m > 0.0) {
      const double ratio = q_[i] / m;
      const double delta = ratio >= 1.0 - rule.tie_tolerance ? 0.0 : -rate_ * (1.0 - ratio);
      g = std::max(before + delta, 0.0);
      if (g < rule.threshold) g = 0.0;
    }
    gains_[i] = g;
    changed = changed || g != before;
  }
  return changed;
}

}  // namespace msc
