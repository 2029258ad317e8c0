#include "pvgp/hrv.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "pvgp/csv.hpp"
#include "pvgp/error.hpp"

namespace pvgp {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'R', 'V', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& source) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw DataError(source + ": truncated HRV container");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

PixelIndex pixel_containing(const RasterGeometry& g, double easting,
                            double northing) {
  return {static_cast<std::int64_t>(
              std::floor((easting - g.origin_easting) / g.pixel_size)),
          static_cast<std::int64_t>(
              std::floor((g.origin_northing - northing) / g.pixel_size))};
}

HrvRasterStack::HrvRasterStack(RasterGeometry geometry,
                               std::vector<HrvFrame> frames)
    : geometry_(geometry), frames_(std::move(frames)) {
  if (!(geometry_.pixel_size > 0.0) || !std::isfinite(geometry_.origin_easting) ||
      !std::isfinite(geometry_.origin_northing))
    throw DataError("HRV raster geometry is invalid");
  const std::size_t cells =
      static_cast<std::size_t>(geometry_.width) * geometry_.height;
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (i > 0 && !(frames_[i].time > frames_[i - 1].time))
      throw DataError("HRV frames must be strictly time-sorted (frame " +
                      std::to_string(i) + ")");
    if (frames_[i].pixels.size() != cells)
      throw DataError("HRV frame " + std::to_string(i) +
                      " does not match raster dimensions");
    for (float v : frames_[i].pixels)
      if (!std::isfinite(v) || v < 0.0f)
        throw DataError("HRV frame " + std::to_string(i) +
                        " holds a negative or non-finite pixel");
  }
}

const HrvFrame* HrvRasterStack::find(UtcTime t) const {
  const auto it = std::lower_bound(
      frames_.begin(), frames_.end(), t,
      [](const HrvFrame& f, UtcTime v) { return f.time < v; });
  return it != frames_.end() && it->time == t ? &*it : nullptr;
}

void check_patch_coverage(const RasterGeometry& g, const GeoPoint& location,
                          int patch_px) {
  if (patch_px < 1) throw DataError("patch size must be >= 1 pixel");
  const PixelIndex p = pixel_containing(g, location.easting, location.northing);
  const std::int64_t half = patch_px / 2;
  const std::int64_t x0 = p.px - half, x1 = p.px - half + patch_px - 1;
  const std::int64_t y0 = p.py - half, y1 = p.py - half + patch_px - 1;
  if (x0 < 0 || y0 < 0 || x1 >= static_cast<std::int64_t>(g.width) ||
      y1 >= static_cast<std::int64_t>(g.height))
    throw CoverageError(std::to_string(patch_px) + "x" +
                        std::to_string(patch_px) + " patch around pixel (" +
                        std::to_string(p.px) + ", " + std::to_string(p.py) +
                        ") leaves the " + std::to_string(g.width) + "x" +
                        std::to_string(g.height) + " raster");
}

double hrv_patch_mean(const RasterGeometry& g, const HrvFrame& frame,
                      const GeoPoint& location, int patch_px,
                      double sensor_max) {
  check_patch_coverage(g, location, patch_px);
  const PixelIndex p = pixel_containing(g, location.easting, location.northing);
  const std::int64_t half = patch_px / 2;
  double sum = 0.0;
  for (std::int64_t y = p.py - half; y < p.py - half + patch_px; ++y)
    for (std::int64_t x = p.px - half; x < p.px - half + patch_px; ++x)
      sum += static_cast<double>(frame.at(g, x, y));
  const double mean = sum / (static_cast<double>(patch_px) * patch_px);
  return std::clamp(mean / sensor_max, 0.0, 1.0);
}

double hrv_patch_mean(const HrvRasterStack& stack, const GeoPoint& location,
                      int patch_px, UtcTime t, double sensor_max) {
  const HrvFrame* frame = stack.find(t);
  if (!frame)
    throw AlignmentError("no HRV frame at " + format_utc(t));
  return hrv_patch_mean(stack.geometry(), *frame, location, patch_px,
                        sensor_max);
}

void write_hrv_binary(const std::filesystem::path& path,
                      const HrvRasterStack& stack) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const RasterGeometry& g = stack.geometry();
  out.write(kMagic.data(), kMagic.size());
  put_le<double>(out, g.origin_easting);
  put_le<double>(out, g.origin_northing);
  put_le<double>(out, g.pixel_size);
  put_le<std::uint32_t>(out, g.width);
  put_le<std::uint32_t>(out, g.height);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stack.frames().size()));
  for (const HrvFrame& f : stack.frames()) {
    put_le<std::int64_t>(out, f.time.time_since_epoch().count());
    for (float v : f.pixels) put_le<float>(out, v);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

HrvRasterStack read_hrv_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string source = path.string();
  if (!in) throw DataError("cannot open " + source);
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw DataError(source + ": not an HRV1 container");
  RasterGeometry g;
  g.origin_easting = get_le<double>(in, source);
  g.origin_northing = get_le<double>(in, source);
  g.pixel_size = get_le<double>(in, source);
  g.width = get_le<std::uint32_t>(in, source);
  g.height = get_le<std::uint32_t>(in, source);
  const auto count = get_le<std::uint32_t>(in, source);
  const std::size_t cells = static_cast<std::size_t>(g.width) * g.height;

  std::vector<HrvFrame> frames(count);
  for (auto& f : frames) {
    f.time = UtcTime{std::chrono::seconds{get_le<std::int64_t>(in, source)}};
    f.pixels.resize(cells);
    for (auto& v : f.pixels) v = get_le<float>(in, source);
  }
  return HrvRasterStack(g, std::move(frames));
}

HrvRasterStack read_hrv_csv(const std::filesystem::path& path,
                            const RasterGeometry& geometry) {
  CsvReader reader(path);
  reader.expect_header({"t", "px", "py", "value"});
  const std::size_t cells =
      static_cast<std::size_t>(geometry.width) * geometry.height;
  std::map<UtcTime, std::vector<float>> grids;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto where = reader.source() + ":" + std::to_string(reader.line());
    if (f.size() != 4) throw DataError(where + ": expected 4 fields");
    UtcTime t;
    long long secs = 0;
    if (parse_int64(f[0], secs)) {
      t = UtcTime{std::chrono::seconds{secs}};
    } else {
      t = parse_utc(f[0]);
    }
    long long px = 0, py = 0;
    double value = 0.0;
    if (!parse_int64(f[1], px) || !parse_int64(f[2], py) ||
        !parse_double(f[3], value))
      throw DataError(where + ": malformed HRV cell");
    if (px < 0 || py < 0 || px >= geometry.width || py >= geometry.height)
      throw DataError(where + ": pixel outside the declared raster");
    auto& grid = grids[t];
    if (grid.empty()) grid.assign(cells, 0.0f);
    grid[static_cast<std::size_t>(py) * geometry.width +
         static_cast<std::size_t>(px)] = static_cast<float>(value);
  }
  std::vector<HrvFrame> frames;
  frames.reserve(grids.size());
  for (auto& [t, grid] : grids) frames.push_back({t, std::move(grid)});
  return HrvRasterStack(geometry, std::move(frames));
}

void write_hrv_csv(const std::filesystem::path& path,
                   const HrvRasterStack& stack) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const RasterGeometry& g = stack.geometry();
  out << "t,px,py,value\n";
  for (const HrvFrame& f : stack.frames())
    for (std::uint32_t y = 0; y < g.height; ++y)
      for (std::uint32_t x = 0; x < g.width; ++x)
        out << format_utc(f.time) << ',' << x << ',' << y << ','
            << format_double(f.at(g, x, y)) << '\n';
}

}  // namespace pvgp
