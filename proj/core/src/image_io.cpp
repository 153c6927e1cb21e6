#include "memdeblur/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace memdeblur {
namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

std::uint8_t quantize(double v) {
  v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

// Skips whitespace and '#' comments in PNM headers.
int pnm_next_token(std::istream& in) {
  int value = 0;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      in.putback(c);
      in >> value;
      return value;
    }
  }
  throw std::runtime_error("truncated PNM header");
}

Image read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char p, kind;
  in.get(p);
  in.get(kind);
  if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6')) {
    throw std::runtime_error(path + ": not a supported PNM file");
  }
  const bool color = (kind == '3' || kind == '6');
  const bool binary = (kind == '5' || kind == '6');
  const int width = pnm_next_token(in);
  const int height = pnm_next_token(in);
  const int maxval = pnm_next_token(in);
  if (maxval <= 0 || maxval > 255) {
    throw std::runtime_error(path + ": unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  }
  Image img(height, width, color ? 3 : 1);
  const int samples = width * height * (color ? 3 : 1);
  if (binary) {
    in.get();  // single whitespace after maxval
    std::vector<std::uint8_t> raw(samples);
    in.read(reinterpret_cast<char*>(raw.data()), samples);
    if (in.gcount() != samples) throw std::runtime_error(path + ": truncated pixel data");
    int i = 0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        for (int c = 0; c < img.channels; ++c)
          img.at(c, y, x) = raw[i++] / static_cast<double>(maxval);
  } else {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        for (int c = 0; c < img.channels; ++c)
          img.at(c, y, x) = pnm_next_token(in) / static_cast<double>(maxval);
  }
  return img;
}

void write_pnm(const Image& img, const std::string& path, bool color) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << (color ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (color) {
        for (int c = 0; c < 3; ++c) {
          const double v = img.channels == 3 ? img.at(c, y, x) : img.at(0, y, x);
          out.put(static_cast<char>(quantize(v)));
        }
      } else {
        out.put(static_cast<char>(quantize(img.at(0, y, x))));
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};

Image read_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": libpng read error");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": unsupported bit depth (16)");
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": unsupported channel count");
  }
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(height) * width * channels);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = raw.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(static_cast<int>(height), static_cast<int>(width), channels);
  std::size_t i = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < channels; ++c)
        img.at(c, y, x) = raw[i++] / 255.0;
  return img;
}

void write_png(const Image& img, const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": libpng write error");
  }
  png_init_io(png, fp.get());
  const int color_type = img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, img.width, img.height, 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * img.channels);
  for (int y = 0; y < img.height; ++y) {
    std::size_t i = 0;
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        row[i++] = quantize(img.at(c, y, x));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image read_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "png") return read_png(path);
  if (ext == "pgm" || ext == "ppm" || ext == "pnm") return read_pnm(path);
  // Fall back to magic bytes.
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open " + path);
  char magic[2] = {0, 0};
  probe.read(magic, 2);
  probe.close();
  if (magic[0] == 'P') return read_pnm(path);
  if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') return read_png(path);
  throw std::runtime_error(path + ": unrecognized image format");
}

void write_image(const Image& img, const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "png") {
    write_png(img, path);
  } else if (ext == "pgm") {
    write_pnm(to_gray(img), path, false);
  } else if (ext == "ppm" || ext == "pnm") {
    write_pnm(img, path, true);
  } else {
    throw std::runtime_error(path + ": unsupported output format (use .png/.pgm/.ppm)");
  }
}

Kernel read_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int k = 0;
  if (!(in >> k) || k <= 0) throw std::runtime_error(path + ": bad kernel header");
  std::vector<double> w(static_cast<std::size_t>(k) * k);
  for (double& v : w) {
    if (!(in >> v)) throw std::runtime_error(path + ": truncated kernel data");
  }
  Kernel kernel(k, std::move(w));
  kernel.normalize();
  return kernel;
}

void write_kernel(const Kernel& kernel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kernel.size << "\n";
  out.precision(17);
  for (int y = 0; y < kernel.size; ++y) {
    for (int x = 0; x < kernel.size; ++x) {
      out << kernel.at(y, x) << (x + 1 == kernel.size ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace memdeblur
