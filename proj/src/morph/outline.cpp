#include "msc/morph/outline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msc/core/errors.hpp"

namespace msc::morph {

namespace {

// Distance from (px,py) to the segment (0,0)-(ax,ay).
double distance_to_axis(double px, double py, double ax, double ay) {
  const double len2 = ax * ax + ay * ay;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((px * ax + py * ay) / len2, 0.0, 1.0);
  return std::hypot(px - t * ax, py - t * ay);
}

constexpr double band_slack = 1e-9;

std::int64_t offset_key(int ax, int ay) {
  return (static_cast<std::int64_t>(ax) << 32) ^ static_cast<std::uint32_t>(ay);
}

}  // namespace

std::vector<PixelOffset> capsule_outline(int ax, int ay, double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ContractError("capsule half-width must be positive");
  const bool thin = half_width < 1.0;
  const double lo = thin ? 0.0 : half_width - 0.5;
  const double hi = thin ? 0.5 : half_width + 0.5;
  const int pad = static_cast<int>(std::ceil(hi)) + 1;
  std::vector<PixelOffset> out;
  for (int y = std::min(0, ay) - pad; y <= std::max(0, ay) + pad; ++y)
    for (int x = std::min(0, ax) - pad; x <= std::max(0, ax) + pad; ++x) {
      const double d = distance_to_axis(x, y, ax, ay);
      if (d >= lo - band_slack && d <= hi + band_slack) out.push_back({x, y});
    }
  return out;
}

double outline_weight(std::size_t cells) noexcept {
  return cells == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(cells));
}

Field morph_project_segment(const Space& image, Voxel proximal, Voxel distal, double half_width) {
  if (image.kind() != SpaceKind::grid2d) throw ContractError("outline target must be a 2D grid");
  const auto cells = capsule_outline(distal.x - proximal.x, distal.y - proximal.y, half_width);
  const double w = outline_weight(cells.size());
  std::vector<Entry> out;
  for (const auto& o : cells) {
    const int x = proximal.x + o.dx;
    const int y = proximal.y + o.dy;
    if (image.contains(x, y)) out.push_back({image.key(x, y), w});
  }
  return Field::from_entries(image, std::move(out));
}

SegmentMorph::SegmentMorph(Space image, Space pairs, int segment, double half_width,
                           std::string label)
    : image_(image),
      pairs_(pairs),
      segment_(segment),
      half_width_(half_width),
      label_(std::move(label)) {
  if (image.kind() != SpaceKind::grid2d || pairs.kind() != SpaceKind::segment_pairs)
    throw ContractError("morph maps a 2D image to segment pairs");
  if (image.nx() != pairs.nx() || image.ny() != pairs.ny())
    throw ContractError("morph image and voxel grid disagree in x/y size");
  if (segment < 0 || segment >= pairs.segments()) throw ContractError("morph segment out of range");
  if (!(half_width > 0.0)) throw ContractError("morph half-width must be positive");
}

const std::vector<PixelOffset>& SegmentMorph::outline(int ax, int ay) const {
  const std::lock_guard lock(cache_mutex_);
  auto [it, inserted] = cache_.try_emplace(offset_key(ax, ay));
  if (inserted) it->second = capsule_outline(ax, ay, half_width_);
  return it->second;
}

Field SegmentMorph::do_apply(const Field& in, const Field* relevant) const {
  if (relevant == nullptr)
    throw ContractError(label_ + ": pair-keyed transforms need a relevance field");
  const int nx = image_.nx();
  const int ny = image_.ny();
  std::vector<double> dense(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0.0);
  for (const auto& e : in.entries()) dense[e.key] = e.weight;

  const auto v = pairs_.voxel_count();
  const CellKey first = static_cast<CellKey>(segment_) * v * v;
  const CellKey last = first + v * v;
  const auto entries = relevant->entries();
  auto it = std::lower_bound(entries.begin(), entries.end(), first,
                             [](const Entry& e, CellKey k) { return e.key < k; });
  std::vector<Entry> out;
  for (; it != entries.end() && it->key < last; ++it) {
    const SegmentPair p = pairs_.pair(it->key);
    const auto& cells = outline(p.distal.x - p.proximal.x, p.distal.y - p.proximal.y);
    double sum = 0.0;
    for (const auto& o : cells) {
      const int x = p.proximal.x + o.dx;
      const int y = p.proximal.y + o.dy;
      if (x >= 0 && y >= 0 && x < nx && y < ny)
        sum += dense[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) +
                     static_cast<std::size_t>(x)];
    }
    if (sum > 0.0) out.push_back({it->key, sum * outline_weight(cells.size())});
  }
  return Field::from_entries(pairs_, std::move(out));
}

Field SegmentMorph::do_adjoint(const Field& in) const {
  const int nx = image_.nx();
  const int ny = image_.ny();
  std::vector<double> dense(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0.0);
  for (const auto& e : in.entries()) {
    const SegmentPair p = pairs_.pair(e.key);
    if (p.segment != segment_) continue;
    const auto& cells = outline(p.distal.x - p.proximal.x, p.distal.y - p.proximal.y);
    const double w = e.weight * outline_weight(cells.size());
    for (const auto& o : cells) {
      const int x = p.proximal.x + o.dx;
      const int y = p.proximal.y + o.dy;
      if (x >= 0 && y >= 0 && x < nx && y < ny)
        dense[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) +
              static_cast<std::size_t>(x)] += w;
    }
  }
  std::vector<Entry> out;
  for (std::size_t k = 0; k < dense.size(); ++k)
    if (dense[k] > 0.0) out.push_back({k, dense[k]});
  return Field::from_entries(image_, std::move(out));
}

TransformFamily build_morph_family(const kinematics::SkeletonModel& model, const Space& image,
                                   const Space& pairs,
                                   const std::vector<std::vector<double>>& width_scales) {
  const auto segments = model.segments();
  if (width_scales.size() != segments.size())
    throw ConfigError("morph variants: expected one list per segment");
  if (pairs.segments() != static_cast<int>(segments.size()))
    throw ContractError("pair space does not match the skeleton");
  TransformFamily family;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (width_scales[s].empty())
      throw ConfigError("morph variants: segment '" + segments[s].name + "' has none");
    for (double scale : width_scales[s]) {
      if (!(scale > 0.0) || !std::isfinite(scale))
        throw ConfigError("morph variants: width scales must be positive");
      std::ostringstream label;
      label << "morph(" << segments[s].name << ",x" << scale << ")";
      family.add(std::make_shared<SegmentMorph>(image, pairs, static_cast<int>(s),
                                                scale * segments[s].base_width, label.str()),
                 static_cast<int>(s));
    }
  }
  return family;
}

Field render_figure(const Space& image, std::span<const Voxel> proximal,
                    std::span<const Voxel> distal, std::span<const double> half_widths) {
  if (proximal.size() != distal.size() || proximal.size() != half_widths.size())
    throw ContractError("render_figure: mismatched segment lists");
  FieldBuilder builder(image);
  for (std::size_t s = 0; s < proximal.size(); ++s)
    builder.add_field(morph_project_segment(image, proximal[s], distal[s], half_widths[s]));
  return builder.build();
}

}  // namespace msc::morph
