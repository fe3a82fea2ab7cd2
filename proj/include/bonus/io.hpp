#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bonus/affinity.hpp"
#include "bonus/coarse_labels.hpp"
#include "bonus/raster.hpp"

namespace bonus {

// Raster container ("BONU"):
//   magic "BONU" | version u8 = 1 | dtype u8 (0 = f32, 1 = u16, 2 = u8)
//   height u32 LE | width u32 LE | payload row-major LE
// Round trips are bitwise exact. TriMasks are stored as u16 with
// 0xFFFF = Ignore, 0 = Background, 1..65534 = Foreground id.
enum class RasterDType : std::uint8_t { F32 = 0, U16 = 1, U8 = 2 };

void write_raster_f32(const std::string& path, const RasterF32& raster);
RasterF32 read_raster_f32(const std::string& path);

void write_raster_u16(const std::string& path, const InstanceMap& inst);
InstanceMap read_raster_u16(const std::string& path);

void write_trimask(const std::string& path, const TriMask& mask);
TriMask read_trimask(const std::string& path);

// Instance maps go to "BONU" u16 or 16-bit grayscale PNG (id = gray value),
// chosen by the .png extension.
void write_instance_map(const std::string& path, const InstanceMap& inst);
InstanceMap read_instance_map(const std::string& path);

// 8-bit RGB PNG (grayscale and alpha inputs are expanded/flattened on read).
ImageRGB read_image_png(const std::string& path);
void write_image_png(const std::string& path, const ImageRGB& image);

// Points CSV: header "row,col" or "row,col,score", one point per line,
// integer coordinates. Parsing rejects malformed rows, duplicates, and (when
// bounds are given) out-of-range coordinates, reporting line numbers.
PointSet read_points_csv(const std::string& path, int height = -1, int width = -1);
void write_points_csv(const std::string& path, const PointSet& points);

// Affinity pairs ("BONP"):
//   magic "BONP" | version u8 = 1 | height u32 LE | width u32 LE |
//   count u64 LE | per pair: a_row u16, a_col u16, b_row u16, b_col u16,
//   label u8, subset u8 (all LE)
struct PairsFile {
  int height = 0;
  int width = 0;
  std::vector<AffinityPair> pairs;
};

void write_pairs(const std::string& path, std::span<const AffinityPair> pairs,
                 int height, int width);
PairsFile read_pairs(const std::string& path);

}  // namespace bonus
