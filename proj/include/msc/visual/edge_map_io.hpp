#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "msc/core/field.hpp"

namespace msc::visual {

enum class EdgeMapFormat { pgm, csv };

// Chosen from the extension (.pgm / .csv); throws ConfigError otherwise.
EdgeMapFormat format_from_path(const std::filesystem::path& path);

struct GridSize {
  int width = 0;
  int height = 0;
};

// P2 or P5 greymap; values are divided by maxval. Zero pixels are absent.
Field parse_pgm(std::string_view bytes);

// Optional "# grid W H" line, then an "x,y,w" header and one row per cell.
// Without a grid line the size comes from `size`, or else from the largest
// coordinates present.
Field parse_csv(std::string_view text, std::optional<GridSize> size = {});

// Sorted rows, weights printed with round-trip precision.
std::string format_csv(const Field& grid);
// Binary greymap, maxval 255. Weights are scaled by 1/max(1, max weight) and rounded.
std::string format_pgm(const Field& grid);

Field load_edge_map(const std::filesystem::path& path, std::optional<EdgeMapFormat> format = {},
                    std::optional<GridSize> size = {});
void save_edge_map(const std::filesystem::path& path, const Field& grid,
                   std::optional<EdgeMapFormat> format = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace msc::visual
