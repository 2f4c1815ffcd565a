#pragma once

#include <string>

#include "msc/core/field.hpp"

namespace msc::morph {

struct Rgb {
  unsigned char r = 0;
  unsigned char g = 0;
  unsigned char b = 0;
};

// Deterministic P6 image. Each layer is painted in order with its colour,
// intensity following the field weight relative to the layer maximum.
class PpmCanvas {
 public:
  PpmCanvas(int width, int height, int scale = 1);

  void paint(const Field& image, Rgb colour, int panel = 0);
  // Adds a panel to the right; returns its index.
  int add_panel();
  std::string encode() const;

 private:
  int width_;
  int height_;
  int scale_;
  int panels_ = 1;
  std::vector<std::vector<Rgb>> pixels_;
};

}  // namespace msc::morph
