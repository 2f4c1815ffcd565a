#include "msc/morph/ppm.hpp"

#include <algorithm>
#include <cmath>

#include "msc/core/errors.hpp"

namespace msc::morph {

namespace {

constexpr Rgb separator{48, 48, 48};

unsigned char blend(unsigned char current, unsigned char target, double intensity) {
  const auto v = static_cast<unsigned char>(std::lround(target * intensity));
  return std::max(current, v);
}

}  // namespace

PpmCanvas::PpmCanvas(int width, int height, int scale)
    : width_(width), height_(height), scale_(scale), pixels_(1) {
  if (width <= 0 || height <= 0 || scale <= 0) throw ContractError("empty PPM canvas");
  pixels_[0].assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Rgb{});
}

int PpmCanvas::add_panel() {
  pixels_.emplace_back(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_),
                       Rgb{});
  return panels_++;
}

void PpmCanvas::paint(const Field& image, Rgb colour, int panel) {
  if (panel < 0 || panel >= panels_) throw ContractError("PPM panel out of range");
  const Space& space = image.space();
  if (space.kind() != SpaceKind::grid2d || space.nx() != width_ || space.ny() != height_)
    throw ContractError("PPM layer does not match the canvas size");
  const double top = image.max_weight();
  if (top <= 0.0) return;
  auto& px = pixels_[static_cast<std::size_t>(panel)];
  for (const auto& e : image.entries()) {
    const double t = e.weight / top;
    auto& p = px[e.key];
    p.r = blend(p.r, colour.r, t);
    p.g = blend(p.g, colour.g, t);
    p.b = blend(p.b, colour.b, t);
  }
}

std::string PpmCanvas::encode() const {
  const int panel_w = width_ * scale_;
  const int total_w = panels_ * panel_w + (panels_ - 1) * scale_;
  const int total_h = height_ * scale_;
  std::string out = "P6\n" + std::to_string(total_w) + " " + std::to_string(total_h) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(total_w) * static_cast<std::size_t>(total_h) * 3);
  auto put = [&](int x, int y, Rgb c) {
    const std::size_t at =
        header + (static_cast<std::size_t>(y) * static_cast<std::size_t>(total_w) +
                  static_cast<std::size_t>(x)) * 3;
    out[at] = static_cast<char>(c.r);
    out[at + 1] = static_cast<char>(c.g);
    out[at + 2] = static_cast<char>(c.b);
  };
  for (int y = 0; y < total_h; ++y)
    for (int x = 0; x < total_w; ++x) {
      const int panel = x / (panel_w + scale_);
      const int local = x % (panel_w + scale_);
      if (local >= panel_w) {
        put(x, y, separator);
        continue;
      }
      const auto& px = pixels_[static_cast<std::size_t>(panel)];
      put(x, y,
          px[static_cast<std::size_t>(y / scale_) * static_cast<std::size_t>(width_) +
             static_cast<std::size_t>(local / scale_)]);
    }
  return out;
}

}  // namespace msc::morph
