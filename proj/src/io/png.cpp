#include "psyscale/io/png.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "psyscale/error.hpp"
#include "psyscale/json.hpp"

namespace psyscale {

namespace {

struct Decoded {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 0;   // 1 (gray) or 3 (rgb) after transforms
  int bit_depth = 0;  // 8 or 16
  std::vector<unsigned char> data;  // row-major, big-endian samples for 16 bit
};

struct MemoryReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (src->offset + n > src->size) png_error(png, "truncated PNG");
  std::memcpy(out, src->data + src->offset, n);
  src->offset += n;
}

void append_to_buffer(png_structp png, png_bytep in, png_size_t n) {
  auto* dst = static_cast<std::string*>(png_get_io_ptr(png));
  dst->append(reinterpret_cast<const char*>(in), n);
}

void flush_noop(png_structp) {}

void warn_silently(png_structp, png_const_charp) {}

[[noreturn]] void fail_silently(png_structp png, png_const_charp) { png_longjmp(png, 1); }

// libpng reports errors by longjmp. Everything with a destructor lives
// outside the setjmp region, so the jump only unwinds plain C state.
bool decode(const std::string& bytes, Decoded& out, std::string& message) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, fail_silently, warn_silently);
  if (png == nullptr) {
    message = "png_create_read_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows;
  MemoryReader reader{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), 0};
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    message = "not a decodable PNG";
    return false;
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.data.resize(stride * out.height);
  rows.resize(out.height);
  for (std::size_t y = 0; y < out.height; ++y) rows[y] = out.data.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

Decoded decode_file(const std::filesystem::path& path) {
  const auto bytes = read_text_file(path);
  Decoded d;
  std::string message;
  if (!decode(bytes, d, message)) {
    throw Error(ErrorCode::MalformedImage, path.string() + ": " + message);
  }
  if ((d.channels != 1 && d.channels != 3) || (d.bit_depth != 8 && d.bit_depth != 16)) {
    throw Error(ErrorCode::MalformedImage, path.string() + ": unsupported PNG layout");
  }
  return d;
}

double sample(const Decoded& d, std::size_t index) {
  if (d.bit_depth == 8) return d.data[index] / 255.0;
  const unsigned hi = d.data[2 * index];
  const unsigned lo = d.data[2 * index + 1];
  return ((hi << 8) | lo) / 65535.0;
}

bool encode(const std::vector<std::vector<unsigned char>>& rows, std::size_t width, int bit_depth,
            std::string& out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, fail_silently, warn_silently);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  std::vector<png_const_bytep> row_ptrs;
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, append_to_buffer, flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(rows.size()),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  row_ptrs.reserve(rows.size());
  for (const auto& r : rows) row_ptrs.push_back(r.data());
  for (auto* r : row_ptrs) png_write_row(png, r);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const auto d = decode_file(path);
  const std::size_t n = d.width * d.height;
  std::vector<double> r(n), g(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (d.channels == 1) {
      r[i] = g[i] = b[i] = sample(d, i);
    } else {
      r[i] = sample(d, 3 * i);
      g[i] = sample(d, 3 * i + 1);
      b[i] = sample(d, 3 * i + 2);
    }
  }
  return {GrayImage(d.width, d.height, std::move(r)), GrayImage(d.width, d.height, std::move(g)),
          GrayImage(d.width, d.height, std::move(b))};
}

GrayImage read_gray_png(const std::filesystem::path& path) {
  const auto d = decode_file(path);
  const std::size_t n = d.width * d.height;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = d.channels == 1
               ? sample(d, i)
               : std::clamp((sample(d, 3 * i) + sample(d, 3 * i + 1) + sample(d, 3 * i + 2)) / 3.0,
                            0.0, 1.0);
  }
  return GrayImage(d.width, d.height, std::move(v));
}

ObjectMask read_mask_png(const std::filesystem::path& path) {
  const auto gray = read_gray_png(path);
  std::vector<bool> bits(gray.size());
  const auto px = gray.pixels();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = px[i] >= 0.5;
  return ObjectMask(gray.width(), gray.height(), std::move(bits));
}

void write_gray_png(const std::filesystem::path& path, const GrayImage& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorCode::InvalidParameter, "PNG bit depth must be 8 or 16");
  }
  if (img.empty()) throw Error(ErrorCode::MalformedImage, "cannot write an empty image");
  const double top = bit_depth == 8 ? 255.0 : 65535.0;
  const std::size_t bytes_per = bit_depth / 8;
  std::vector<std::vector<unsigned char>> rows(img.height(),
                                               std::vector<unsigned char>(img.width() * bytes_per));
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const auto q = static_cast<unsigned>(std::lround(img.at(x, y) * top));
      if (bit_depth == 8) {
        rows[y][x] = static_cast<unsigned char>(q);
      } else {
        rows[y][2 * x] = static_cast<unsigned char>(q >> 8);
        rows[y][2 * x + 1] = static_cast<unsigned char>(q & 0xff);
      }
    }
  }
  std::string encoded;
  if (!encode(rows, img.width(), bit_depth, encoded)) {
    throw Error(ErrorCode::IoError, "PNG encoding failed for " + path.string());
  }
  write_text_file(path, encoded);
}

void write_mask_png(const std::filesystem::path& path, const ObjectMask& mask) {
  std::vector<double> v(mask.width() * mask.height());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask.bits()[i] ? 1.0 : 0.0;
  write_gray_png(path, GrayImage(mask.width(), mask.height(), std::move(v)), 8);
}

}  // namespace psyscale
