#include "msc/visual/edge_map_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "msc/core/errors.hpp"

namespace msc::visual {

namespace {

// Byte cursor that tracks the current line for error messages.
class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const noexcept { return pos_ >= text_.size(); }
  std::size_t offset() const noexcept { return pos_; }
  std::size_t line() const noexcept { return line_; }
  char peek() const noexcept { return text_[pos_]; }
  unsigned char take() noexcept {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return static_cast<unsigned char>(c);
  }
  std::string_view rest() const noexcept { return text_.substr(pos_); }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, pos_);
  }

  // PGM header whitespace, including '#' comments.
  void skip_header_space() {
    while (!done()) {
      if (peek() == '#') {
        while (!done() && peek() != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(peek()))) {
        take();
      } else {
        return;
      }
    }
  }

  long read_unsigned(const char* what) {
    skip_header_space();
    if (done() || !std::isdigit(static_cast<unsigned char>(peek())))
      fail(std::string("expected ") + what);
    long v = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (take() - '0');
      if (v > 1'000'000'000L) fail(std::string(what) + " is too large");
    }
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::string format_weight(double w) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("0");
}

}  // namespace

EdgeMapFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm") return EdgeMapFormat::pgm;
  if (ext == ".csv") return EdgeMapFormat::csv;
  throw ConfigError("cannot infer edge-map format from '" + path.string() + "'");
}

Field parse_pgm(std::string_view bytes) {
  Cursor cur(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    cur.fail("not a PGM file (expected P2 or P5 magic)");
  const bool binary = bytes[1] == '5';
  cur.take();
  cur.take();
  const long width = cur.read_unsigned("width");
  const long height = cur.read_unsigned("height");
  const long maxval = cur.read_unsigned("maxval");
  if (width <= 0 || height <= 0) cur.fail("image dimensions must be positive");
  if (maxval <= 0 || maxval > 65535) cur.fail("maxval must be in 1..65535");
  const auto space = Space::grid2d(static_cast<int>(width), static_cast<int>(height));
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<Entry> entries;

  if (binary) {
    if (cur.done() || !std::isspace(static_cast<unsigned char>(cur.peek())))
      cur.fail("expected a single whitespace byte before the raster");
    cur.take();
    const std::size_t sample = maxval < 256 ? 1 : 2;
    const auto raster = cur.rest();
    if (raster.size() < count * sample)
      throw ParseError("raster truncated: expected " + std::to_string(count * sample) +
                           " bytes, found " + std::to_string(raster.size()),
                       0, cur.offset() + raster.size());
    for (std::size_t i = 0; i < count; ++i) {
      long v = static_cast<unsigned char>(raster[i * sample]);
      if (sample == 2) v = (v << 8) | static_cast<unsigned char>(raster[i * sample + 1]);
      if (v > maxval)
        throw ParseError("sample exceeds maxval", 0, cur.offset() + i * sample);
      if (v > 0) entries.push_back({static_cast<CellKey>(i), static_cast<double>(v) / maxval});
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = cur.read_unsigned("pixel value");
      if (v > maxval) cur.fail("sample exceeds maxval");
      if (v > 0) entries.push_back({static_cast<CellKey>(i), static_cast<double>(v) / maxval});
    }
    cur.skip_header_space();
    if (!cur.done()) cur.fail("trailing data after raster");
  }
  return Field::from_entries(space, std::move(entries));
}

Field parse_csv(std::string_view text, std::optional<GridSize> size) {
  struct Row {
    long x, y;
    double w;
  };
  std::vector<Row> rows;
  std::optional<GridSize> declared;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    pos = end + 1;
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream is{std::string(line.substr(1))};
      std::string word;
      GridSize g;
      if (is >> word && word == "grid") {
        if (!(is >> g.width >> g.height) || g.width <= 0 || g.height <= 0)
          throw ParseError("malformed grid line", line_no, start);
        declared = g;
      }
      continue;
    }
    if (!header_seen) {
      std::string h(line);
      h.erase(std::remove_if(h.begin(), h.end(), [](unsigned char c) { return std::isspace(c); }),
              h.end());
      if (h != "x,y,w") throw ParseError("expected header 'x,y,w'", line_no, start);
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw ParseError("expected three comma-separated fields", line_no, start);
    Row r{};
    if (!parse_number(line.substr(0, c1), r.x) || !parse_number(line.substr(c1 + 1, c2 - c1 - 1), r.y))
      throw ParseError("coordinates must be integers", line_no, start);
    if (!parse_number(line.substr(c2 + 1), r.w) || !std::isfinite(r.w))
      throw ParseError("weight must be a finite number", line_no, start + c2 + 1);
    if (r.x < 0 || r.y < 0) throw ParseError("coordinates must be nonnegative", line_no, start);
    if (r.w < 0.0) throw ParseError("weights must be nonnegative", line_no, start + c2 + 1);
    rows.push_back(r);
  }
  if (!header_seen) throw ParseError("missing 'x,y,w' header", line_no, text.size());

  GridSize g;
  if (declared) {
    g = *declared;
  } else if (size) {
    g = *size;
  } else {
    for (const auto& r : rows) {
      g.width = std::max(g.width, static_cast<int>(r.x) + 1);
      g.height = std::max(g.height, static_cast<int>(r.y) + 1);
    }
    if (g.width == 0) g = {1, 1};
  }
  const auto space = Space::grid2d(g.width, g.height);
  std::vector<Entry> entries;
  entries.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.x >= g.width || r.y >= g.height)
      throw ParseError("cell (" + std::to_string(r.x) + "," + std::to_string(r.y) +
                           ") outside the " + std::to_string(g.width) + "x" +
                           std::to_string(g.height) + " grid",
                       0, 0);
    entries.push_back({space.key(static_cast<int>(r.x), static_cast<int>(r.y)), r.w});
  }
  return Field::from_entries(space, std::move(entries));
}

std::string format_csv(const Field& grid) {
  const auto& s = grid.space();
  if (s.kind() != SpaceKind::grid2d) throw ContractError("edge maps are 2D grids");
  std::string out = "# grid " + std::to_string(s.nx()) + " " + std::to_string(s.ny()) + "\nx,y,w\n";
  for (const auto& e : grid.entries()) {
    const auto v = s.voxel(e.key);
    out += std::to_string(v.x) + "," + std::to_string(v.y) + "," + format_weight(e.weight) + "\n";
  }
  return out;
}

std::string format_pgm(const Field& grid) {
  const auto& s = grid.space();
  if (s.kind() != SpaceKind::grid2d) throw ContractError("edge maps are 2D grids");
  const double scale = 255.0 / std::max(1.0, grid.max_weight());
  std::string out = "P5\n" + std::to_string(s.nx()) + " " + std::to_string(s.ny()) + "\n255\n";
  std::string raster(static_cast<std::size_t>(s.voxel_count()), '\0');
  for (const auto& e : grid.entries())
    raster[e.key] = static_cast<char>(static_cast<unsigned char>(std::lround(e.weight * scale)));
  return out + raster;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

Field load_edge_map(const std::filesystem::path& path, std::optional<EdgeMapFormat> format,
                    std::optional<GridSize> size) {
  const auto f = format ? *format : format_from_path(path);
  const auto bytes = read_file(path);
  return f == EdgeMapFormat::pgm ? parse_pgm(bytes) : parse_csv(bytes, size);
}

void save_edge_map(const std::filesystem::path& path, const Field& grid,
                   std::optional<EdgeMapFormat> format) {
  const auto f = format ? *format : format_from_path(path);
  write_file(path, f == EdgeMapFormat::pgm ? format_pgm(grid) : format_csv(grid));
}

}  // namespace msc::visual
