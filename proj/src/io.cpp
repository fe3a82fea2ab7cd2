#include "bonus/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace bonus {

namespace {

constexpr char kRasterMagic[4] = {'B', 'O', 'N', 'U'};
constexpr char kPairsMagic[4] = {'B', 'O', 'N', 'P'};
constexpr std::uint16_t kTriIgnoreU16 = 0xFFFF;

void put_u32(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xFF));
  buf.push_back(static_cast<char>((v >> 8) & 0xFF));
  buf.push_back(static_cast<char>((v >> 16) & 0xFF));
  buf.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xFF));
  buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}

class ByteReader {
 public:
  ByteReader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    data_ = ss.str();
  }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint8_t>(data_[pos_]) |
                      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[pos_ + 1])) << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() {
    std::uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  void expect_magic(const char magic[4]) {
    need(4);
    if (std::memcmp(data_.data() + pos_, magic, 4) != 0)
      throw std::runtime_error(path_ + ": bad magic at byte 0");
    pos_ += 4;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t offset() const { return pos_; }
  const std::string& path() const { return path_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size())
      throw std::runtime_error(path_ + ": truncated at byte " + std::to_string(pos_));
  }
  std::string path_;
  std::string data_;
  std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string raster_header(RasterDType dtype, int height, int width) {
  if (height < 1 || width < 1) throw std::invalid_argument("raster dimensions must be >= 1");
  std::string buf;
  buf.append(kRasterMagic, 4);
  buf.push_back(1);  // version
  buf.push_back(static_cast<char>(dtype));
  put_u32(buf, static_cast<std::uint32_t>(height));
  put_u32(buf, static_cast<std::uint32_t>(width));
  return buf;
}

struct RasterHeader {
  RasterDType dtype;
  int height;
  int width;
};

RasterHeader read_raster_header(ByteReader& r) {
  r.expect_magic(kRasterMagic);
  std::uint8_t version = r.u8();
  if (version != 1)
    throw std::runtime_error(r.path() + ": unsupported raster version " +
                             std::to_string(version));
  std::uint8_t dtype = r.u8();
  if (dtype > 2)
    throw std::runtime_error(r.path() + ": unknown dtype " + std::to_string(dtype) +
                             " at byte 5");
  std::uint32_t h = r.u32(), w = r.u32();
  if (h < 1 || w < 1 || h > 0x7FFFFFFFu || w > 0x7FFFFFFFu)
    throw std::runtime_error(r.path() + ": invalid dimensions");
  return {static_cast<RasterDType>(dtype), static_cast<int>(h), static_cast<int>(w)};
}

bool has_png_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".png";
}

}  // namespace

// PNG codec lives in png_io.cpp
InstanceMap read_instance_png(const std::string& path);
void write_instance_png(const std::string& path, const InstanceMap& inst);

void write_raster_f32(const std::string& path, const RasterF32& raster) {
  std::string buf = raster_header(RasterDType::F32, raster.height, raster.width);
  buf.reserve(buf.size() + raster.size() * 4);
  for (float f : raster.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(buf, bits);
  }
  write_file(path, buf);
}

RasterF32 read_raster_f32(const std::string& path) {
  ByteReader r(path);
  RasterHeader h = read_raster_header(r);
  if (h.dtype != RasterDType::F32)
    throw std::runtime_error(path + ": expected f32 raster (dtype 0)");
  std::size_t n = static_cast<std::size_t>(h.height) * h.width;
  if (r.remaining() != n * 4)
    throw std::runtime_error(path + ": payload size mismatch at byte " +
                             std::to_string(r.offset()));
  RasterF32 out(h.height, h.width);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = r.f32();
  return out;
}

void write_raster_u16(const std::string& path, const InstanceMap& inst) {
  std::string buf = raster_header(RasterDType::U16, inst.height, inst.width);
  buf.reserve(buf.size() + inst.size() * 2);
  for (int32_t id : inst.ids) {
    if (id < 0 || id > 0xFFFE)
      throw std::runtime_error("instance id " + std::to_string(id) +
                               " out of u16 range for " + path);
    put_u16(buf, static_cast<std::uint16_t>(id));
  }
  write_file(path, buf);
}

InstanceMap read_raster_u16(const std::string& path) {
  ByteReader r(path);
  RasterHeader h = read_raster_header(r);
  if (h.dtype != RasterDType::U16)
    throw std::runtime_error(path + ": expected u16 raster (dtype 1)");
  std::size_t n = static_cast<std::size_t>(h.height) * h.width;
  if (r.remaining() != n * 2)
    throw std::runtime_error(path + ": payload size mismatch at byte " +
                             std::to_string(r.offset()));
  InstanceMap out(h.height, h.width);
  for (std::size_t i = 0; i < n; ++i) out.ids[i] = r.u16();
  return out;
}

void write_trimask(const std::string& path, const TriMask& mask) {
  std::string buf = raster_header(RasterDType::U16, mask.height, mask.width);
  buf.reserve(buf.size() + mask.size() * 2);
  for (int32_t tag : mask.tags) {
    std::uint16_t v;
    if (tag == TriMask::kIgnore)
      v = kTriIgnoreU16;
    else if (tag >= 0 && tag <= 0xFFFE)
      v = static_cast<std::uint16_t>(tag);
    else
      throw std::runtime_error("trimask tag " + std::to_string(tag) +
                               " out of u16 range for " + path);
    put_u16(buf, v);
  }
  write_file(path, buf);
}

TriMask read_trimask(const std::string& path) {
  InstanceMap raw = read_raster_u16(path);
  TriMask out(raw.height, raw.width);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::uint16_t v = static_cast<std::uint16_t>(raw.ids[i]);
    out.tags[i] = v == kTriIgnoreU16 ? TriMask::kIgnore : static_cast<int32_t>(v);
  }
  return out;
}

void write_instance_map(const std::string& path, const InstanceMap& inst) {
  if (has_png_extension(path))
    write_instance_png(path, inst);
  else
    write_raster_u16(path, inst);
}

InstanceMap read_instance_map(const std::string& path) {
  if (has_png_extension(path)) return read_instance_png(path);
  return read_raster_u16(path);
}

PointSet read_points_csv(const std::string& path, int height, int width) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_scores;
  if (line == "row,col")
    with_scores = false;
  else if (line == "row,col,score")
    with_scores = true;
  else
    throw std::runtime_error(path + ": line 1: expected header \"row,col[,score]\"");

  PointSet out;
  std::unordered_set<long long> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = path + ": line " + std::to_string(line_no);

    std::array<std::string, 3> fields;
    std::size_t nfields = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (nfields >= 3) throw std::runtime_error(where + ": too many fields");
        fields[nfields++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (nfields != (with_scores ? 3u : 2u))
      throw std::runtime_error(where + ": expected " + (with_scores ? "3" : "2") +
                               " fields, got " + std::to_string(nfields));

    auto parse_int = [&](const std::string& s) {
      int v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error(where + ": invalid integer \"" + s + "\"");
      return v;
    };
    Point pt{parse_int(fields[0]), parse_int(fields[1])};
    if (pt.row < 0 || pt.col < 0 || (height >= 0 && pt.row >= height) ||
        (width >= 0 && pt.col >= width))
      throw std::runtime_error(where + ": point out of bounds");
    if (!seen.insert(static_cast<long long>(pt.row) * 0x40000000LL + pt.col).second)
      throw std::runtime_error(where + ": duplicate point");
    out.points.push_back(pt);
    if (with_scores) {
      try {
        out.scores.push_back(std::stof(fields[2]));
      } catch (const std::exception&) {
        throw std::runtime_error(where + ": invalid score \"" + fields[2] + "\"");
      }
    }
  }
  return out;
}

void write_points_csv(const std::string& path, const PointSet& points) {
  std::string buf = points.has_scores() ? "row,col,score\n" : "row,col\n";
  char num[64];
  for (std::size_t i = 0; i < points.size(); ++i) {
    buf += std::to_string(points.points[i].row);
    buf += ',';
    buf += std::to_string(points.points[i].col);
    if (points.has_scores()) {
      buf += ',';
      auto [p, ec] = std::to_chars(num, num + sizeof(num), points.scores[i]);
      buf.append(num, p);
    }
    buf += '\n';
  }
  write_file(path, buf);
}

void write_pairs(const std::string& path, std::span<const AffinityPair> pairs,
                 int height, int width) {
  std::string buf;
  buf.append(kPairsMagic, 4);
  buf.push_back(1);  // version
  put_u32(buf, static_cast<std::uint32_t>(height));
  put_u32(buf, static_cast<std::uint32_t>(width));
  put_u64(buf, pairs.size());
  buf.reserve(buf.size() + pairs.size() * 10);
  for (const AffinityPair& p : pairs) {
    put_u16(buf, p.a_row);
    put_u16(buf, p.a_col);
    put_u16(buf, p.b_row);
    put_u16(buf, p.b_col);
    buf.push_back(static_cast<char>(p.label));
    buf.push_back(static_cast<char>(p.subset));
  }
  write_file(path, buf);
}

PairsFile read_pairs(const std::string& path) {
  ByteReader r(path);
  r.expect_magic(kPairsMagic);
  std::uint8_t version = r.u8();
  if (version != 1)
    throw std::runtime_error(path + ": unsupported pairs version " + std::to_string(version));
  PairsFile out;
  out.height = static_cast<int>(r.u32());
  out.width = static_cast<int>(r.u32());
  std::uint64_t count = r.u64();
  if (r.remaining() != count * 10)
    throw std::runtime_error(path + ": payload size mismatch at byte " +
                             std::to_string(r.offset()));
  out.pairs.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    AffinityPair& p = out.pairs[i];
    p.a_row = r.u16();
    p.a_col = r.u16();
    p.b_row = r.u16();
    p.b_col = r.u16();
    std::uint8_t label = r.u8();
    std::uint8_t subset = r.u8();
    if (label > 1)
      throw std::runtime_error(path + ": invalid pair label at byte " +
                               std::to_string(r.offset() - 2));
    if (subset > 3)
      throw std::runtime_error(path + ": invalid pair subset at byte " +
                               std::to_string(r.offset() - 1));
    // positive subsets carry label 1, negative subsets label 0
    bool positive_subset = subset == static_cast<std::uint8_t>(AffinitySubset::FgPos) ||
                           subset == static_cast<std::uint8_t>(AffinitySubset::BgPos);
    if (positive_subset != (label == 1))
      throw std::runtime_error(path + ": pair label contradicts its subset at byte " +
                               std::to_string(r.offset() - 2));
    p.label = static_cast<std::int8_t>(label);
    p.subset = static_cast<AffinitySubset>(subset);
  }
  return out;
}

}  // namespace bonus
