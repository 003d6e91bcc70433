#include "nighthaze/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace nighthaze {

namespace fs = std::filesystem;

std::uint32_t quantize(double v, std::uint32_t maxval) noexcept {
  const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  return static_cast<std::uint32_t>(std::floor(c * static_cast<double>(maxval) + 0.5));
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

// ---------------------------------------------------------------- PNG

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  if (message != nullptr) *message = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

PlanarImage read_png(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (png == nullptr) throw IoError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  PlanarImage img;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG '" + path.string() + "': " + error);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // host little-endian 16-bit words
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int out_depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * static_cast<std::size_t>(height));
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + rowbytes * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw IoError("unsupported PNG channel layout in '" + path.string() + "'");
  }
  img = PlanarImage(width, height, channels);
  const double scale = out_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (int y = 0; y < height; ++y) {
    const png_byte* row = rows[y];
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t k = static_cast<std::size_t>(x) * channels + c;
        double v;
        if (out_depth == 16) {
          std::uint16_t word;
          std::memcpy(&word, row + 2 * k, 2);
          v = word;
        } else {
          v = row[k];
        }
        img.at(x, y, c) = v * scale;
      }
    }
  }
  return img;
}

void write_png(const fs::path& path, const PlanarImage& img, int bit_depth) {
  FilePtr file = open_file(path, "wb");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (png == nullptr) throw IoError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);

  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  const std::size_t bytes = bit_depth == 16 ? 2 : 1;
  const std::uint32_t maxval = bit_depth == 16 ? 65535u : 255u;
  std::vector<png_byte> buffer(static_cast<std::size_t>(w) * h * ch * bytes);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        const std::size_t k = (static_cast<std::size_t>(y) * w + x) * ch + c;
        const std::uint32_t q = quantize(img.at(x, y, c), maxval);
        if (bytes == 2) {
          buffer[2 * k] = static_cast<png_byte>(q >> 8);  // PNG is big-endian
          buffer[2 * k + 1] = static_cast<png_byte>(q & 0xff);
        } else {
          buffer[k] = static_cast<png_byte>(q);
        }
      }
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  const std::size_t rowbytes = static_cast<std::size_t>(w) * ch * bytes;
  for (int y = 0; y < h; ++y) rows[y] = buffer.data() + rowbytes * static_cast<std::size_t>(y);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode PNG '" + path.string() + "': " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
               ch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------- PNM

// Reads the next whitespace-delimited header integer, skipping '#' comments.
long read_pnm_int(std::istream& in, const fs::path& path) {
  int ch = in.get();
  while (in && (std::isspace(ch) || ch == '#')) {
    if (ch == '#') {
      while (in && ch != '\n') ch = in.get();
    }
    ch = in.get();
  }
  if (!in || !std::isdigit(ch)) throw IoError("malformed PNM header in '" + path.string() + "'");
  long value = 0;
  while (in && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    if (value > 1'000'000'000L) throw IoError("PNM header value too large in '" + path.string() + "'");
    ch = in.get();
  }
  return value;  // the single whitespace after the number is consumed
}

PlanarImage read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::array<char, 2> magic{};
  in.read(magic.data(), 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw IoError("unsupported PNM variant in '" + path.string() + "'");
  }
  const int channels = magic[1] == '6' ? 3 : 1;
  const long width = read_pnm_int(in, path);
  const long height = read_pnm_int(in, path);
  const long maxval = read_pnm_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError("invalid PNM header in '" + path.string() + "'");
  }
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * channels * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError("truncated PNM data in '" + path.string() + "'");
  }
  PlanarImage img(static_cast<int>(width), static_cast<int>(height), channels);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t k = (static_cast<std::size_t>(y) * width + x) * channels + c;
        const unsigned v = bytes == 2 ? (static_cast<unsigned>(raw[2 * k]) << 8) | raw[2 * k + 1] : raw[k];
        img.at(static_cast<int>(x), static_cast<int>(y), c) = std::min(1.0, v * scale);
      }
    }
  }
  return img;
}

void write_pnm(const fs::path& path, const PlanarImage& img, int bit_depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::uint32_t maxval = bit_depth == 16 ? 65535u : 255u;
  out << (img.channels() == 3 ? "P6" : "P5") << '\n'
      << img.width() << ' ' << img.height() << '\n'
      << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(img.size() * (bit_depth == 16 ? 2 : 1));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const std::uint32_t q = quantize(img.at(x, y, c), maxval);
        if (bit_depth == 16) raw.push_back(static_cast<unsigned char>(q >> 8));
        raw.push_back(static_cast<unsigned char>(q & 0xff));
      }
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

bool has_png_signature(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), 8);
  return in.gcount() == 8 && png_sig_cmp(sig.data(), 0, 8) == 0;
}

}  // namespace

PlanarImage read_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file '" + path.string() + "'");
  if (has_png_signature(path)) return read_png(path);
  return read_pnm(path);
}

void write_image(const fs::path& path, const PlanarImage& img, int bit_depth) {
  require_non_empty(img, "write_image");
  if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("bit depth must be 8 or 16");
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(path, img, bit_depth);
  } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    if ((ext == ".pgm" && img.channels() != 1) || (ext == ".ppm" && img.channels() != 3)) {
      throw InvalidArgument("channel count does not match extension of '" + path.string() + "'");
    }
    write_pnm(path, img, bit_depth);
  } else {
    throw IoError("unsupported output format '" + ext + "'");
  }
}

}  // namespace nighthaze
