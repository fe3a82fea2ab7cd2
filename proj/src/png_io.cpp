#include <cstdio>
#include <csetjmp>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "bonus/coarse_labels.hpp"
#include "bonus/raster.hpp"

// PNG ingestion/emission: 8-bit RGB for images, 16-bit grayscale for
// instance maps (id = gray value). Backed by libpng; all reads normalize to
// those two layouts.
namespace bonus {

namespace {

struct File {
  std::FILE* fp = nullptr;
  explicit File(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {
    if (!fp) throw std::runtime_error("cannot open file: " + path);
  }
  ~File() {
    if (fp) std::fclose(fp);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  // collected after longjmp; throwing across libpng frames is not allowed
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  longjmp(png_jmpbuf(png), 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

ImageRGB read_image_png(const std::string& path) {
  File file(path, "rb");
  std::string err;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng init failed");
  }

  ImageRGB out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": PNG read error: " + err);
  }

  png_init_io(png, file.fp);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);

  // normalize everything to 8-bit RGB
  png_set_expand(png);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != w * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": unexpected PNG row layout");
  }

  out.height = static_cast<int>(h);
  out.width = static_cast<int>(w);
  out.rgb.resize(static_cast<std::size_t>(h) * w * 3);
  rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r)
    rows[r] = out.rgb.data() + static_cast<std::size_t>(r) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_image_png(const std::string& path, const ImageRGB& image) {
  if (image.height < 1 || image.width < 1)
    throw std::invalid_argument("empty image");
  File file(path, "wb");
  std::string err;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("libpng init failed");
  }

  std::vector<png_bytep> rows(image.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": PNG write error: " + err);
  }

  png_init_io(png, file.fp);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r)
    rows[r] = const_cast<png_bytep>(image.rgb.data() + static_cast<std::size_t>(r) * image.width * 3);
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

InstanceMap read_instance_png(const std::string& path) {
  File file(path, "rb");
  std::string err;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng init failed");
  }

  std::vector<std::uint8_t> buf;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, h = 0;
  int depth = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": PNG read error: " + err);
  }

  png_init_io(png, file.fp);
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  depth = png_get_bit_depth(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": instance PNG must be 8- or 16-bit grayscale");
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buf.resize(row_bytes * h);
  rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r) rows[r] = buf.data() + row_bytes * r;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  InstanceMap out(static_cast<int>(h), static_cast<int>(w));
  for (png_uint_32 r = 0; r < h; ++r) {
    const std::uint8_t* row = buf.data() + row_bytes * r;
    for (png_uint_32 c = 0; c < w; ++c) {
      std::uint16_t v = depth == 16
                            ? static_cast<std::uint16_t>((row[c * 2] << 8) | row[c * 2 + 1])
                            : row[c];  // PNG 16-bit samples are big-endian
      out.ids[static_cast<std::size_t>(r) * w + c] = v;
    }
  }
  return out;
}

void write_instance_png(const std::string& path, const InstanceMap& inst) {
  if (inst.height < 1 || inst.width < 1) throw std::invalid_argument("empty instance map");
  for (int32_t id : inst.ids)
    if (id < 0 || id > 0xFFFF)
      throw std::runtime_error("instance id " + std::to_string(id) +
                               " out of 16-bit range for " + path);

  File file(path, "wb");
  std::string err;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("libpng init failed");
  }

  std::vector<std::uint8_t> buf(static_cast<std::size_t>(inst.height) * inst.width * 2);
  for (int r = 0; r < inst.height; ++r) {
    for (int c = 0; c < inst.width; ++c) {
      std::uint16_t v = static_cast<std::uint16_t>(inst.at(r, c));
      std::size_t i = (static_cast<std::size_t>(r) * inst.width + c) * 2;
      buf[i] = static_cast<std::uint8_t>(v >> 8);
      buf[i + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
  }
  std::vector<png_bytep> rows(inst.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": PNG write error: " + err);
  }

  png_init_io(png, file.fp);
  png_set_IHDR(png, info, inst.width, inst.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < inst.height; ++r)
    rows[r] = buf.data() + static_cast<std::size_t>(r) * inst.width * 2;
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

}  // namespace bonus
