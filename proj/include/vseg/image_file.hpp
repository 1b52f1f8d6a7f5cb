#pragma once

// Lossless 8-bit image files: PNG (libpng), binary PPM/PGM, and uncompressed BMP (read only).

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/image.hpp"

namespace vseg {

namespace file_detail {

inline std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

inline ImageU8 read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
    throw io_error("cannot read PNG " + path.string() + ": " + img.message);
  }
  const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  ImageU8 out(static_cast<int>(img.width), static_cast<int>(img.height), gray ? 1 : 3);
  if (!png_image_finish_read(&img, nullptr, out.data().data(), 0, nullptr)) {
    png_image_free(&img);
    throw io_error("cannot decode PNG " + path.string() + ": " + img.message);
  }
  return out;
}

inline void write_png(const std::filesystem::path& path, const ImageU8& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw dimension_error("PNG export supports 1 or 3 channels");
  }
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, image.data().data(), 0, nullptr)) {
    throw io_error("cannot write PNG " + path.string() + ": " + img.message);
  }
}

inline void skip_pnm_space(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline ImageU8 read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") throw io_error("unsupported PNM variant in " + path.string());
  int w = 0, h = 0, maxval = 0;
  skip_pnm_space(in);
  in >> w;
  skip_pnm_space(in);
  in >> h;
  skip_pnm_space(in);
  in >> maxval;
  in.get();
  if (!in || w <= 0 || h <= 0 || maxval != 255) throw io_error("bad PNM header in " + path.string());
  ImageU8 out(w, h, magic == "P5" ? 1 : 3);
  in.read(reinterpret_cast<char*>(out.data().data()), static_cast<std::streamsize>(out.data().size()));
  if (!in) throw io_error("truncated PNM " + path.string());
  return out;
}

inline void write_pnm(const std::filesystem::path& path, const ImageU8& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << (image.channels() == 1 ? "P5" : "P6") << '\n'
      << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
  if (!out) throw io_error("cannot write " + path.string());
}

inline std::uint32_t le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline ImageU8 read_bmp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 54 || buf[0] != 'B' || buf[1] != 'M') throw io_error("not a BMP: " + path.string());
  const std::uint32_t offset = le32(&buf[10]);
  const int w = static_cast<int>(le32(&buf[18]));
  const auto raw_h = static_cast<std::int32_t>(le32(&buf[22]));
  const int bpp = buf[28] | (buf[29] << 8);
  const std::uint32_t compression = le32(&buf[30]);
  if (compression != 0 || (bpp != 8 && bpp != 24 && bpp != 32)) {
    throw io_error("unsupported BMP encoding in " + path.string());
  }
  const bool bottom_up = raw_h > 0;
  const int h = bottom_up ? raw_h : -raw_h;
  const std::size_t stride = ((static_cast<std::size_t>(w) * bpp + 31) / 32) * 4;
  if (buf.size() < offset + stride * h) throw io_error("truncated BMP " + path.string());
  const unsigned char* palette = &buf[14 + le32(&buf[14])];
  ImageU8 out(w, h, 3);
  for (int y = 0; y < h; ++y) {
    const unsigned char* row = &buf[offset + stride * (bottom_up ? h - 1 - y : y)];
    for (int x = 0; x < w; ++x) {
      const unsigned char* px = bpp == 8 ? palette + 4 * row[x] : row + x * (bpp / 8);
      out(x, y, 0) = px[2];
      out(x, y, 1) = px[1];
      out(x, y, 2) = px[0];
    }
  }
  return out;
}

}  // namespace file_detail

/// Reads an 8-bit image; 1 channel for grayscale files, 3 otherwise.
inline ImageU8 read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw io_error("no such file: " + path.string());
  const std::string ext = file_detail::lower_extension(path);
  if (ext == ".png") return file_detail::read_png(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return file_detail::read_pnm(path);
  if (ext == ".bmp") return file_detail::read_bmp(path);
  throw io_error("unsupported image format: " + path.string());
}

inline void write_image(const std::filesystem::path& path, const ImageU8& image) {
  const std::string ext = file_detail::lower_extension(path);
  if (ext == ".png") return file_detail::write_png(path, image);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return file_detail::write_pnm(path, image);
  throw io_error("unsupported output format: " + path.string());
}

inline bool is_image_file(const std::filesystem::path& path) {
  const std::string ext = file_detail::lower_extension(path);
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".bmp";
}

/// 8-bit to [0,1] RGB; grayscale input is replicated across channels.
inline ImageF to_float_rgb(const ImageU8& image) {
  ImageF out(image.width(), image.height(), 3);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out(x, y, c) = image(x, y, image.channels() == 1 ? 0 : std::min(c, image.channels() - 1)) / 255.0f;
      }
    }
  }
  return out;
}

inline ImageU8 to_u8(const ImageF& image) {
  ImageU8 out(image.width(), image.height(), image.channels());
  auto src = image.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::clamp(src[i] * 255.0f + 0.5f, 0.0f, 255.0f));
  }
  return out;
}

}  // namespace vseg
