#include "image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace fpsynth {

GrayImage::GrayImage(int w, int h, double fill) : width(w), height(h) {
  if (w < 1 || h < 1) fail(Errc::InvalidArgument, "image dimensions must be >= 1");
  data.assign(static_cast<size_t>(w) * h, fill);
}

namespace {

// ----------------------------------------------------------------- PGM

// Reads one PGM header token, skipping whitespace and '#' comments.
bool next_pgm_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  do {
    tok.push_back(static_cast<char>(c));
  } while ((c = in.get()) != EOF && !std::isspace(c));
  return true;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoFailure, "cannot open " + path.string());

  std::string tok;
  if (!next_pgm_token(in, tok) || tok != "P5")
    fail(Errc::MalformedHeader, "not a binary PGM: " + path.string());

  long dims[3];
  for (long& d : dims) {
    if (!next_pgm_token(in, tok)) fail(Errc::MalformedHeader, "truncated PGM header");
    char* end = nullptr;
    d = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
      fail(Errc::MalformedHeader, "bad PGM header token '" + tok + "'");
  }
  const long w = dims[0], h = dims[1], maxval = dims[2];
  if (w < 1 || h < 1) fail(Errc::MalformedHeader, "bad PGM dimensions");
  if (maxval != 255)
    fail(Errc::UnsupportedFormat, "PGM maxval " + std::to_string(maxval) + " (only 255 supported)");

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  std::vector<unsigned char> row(static_cast<size_t>(w));
  for (long y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), w);
    if (in.gcount() != w) fail(Errc::MalformedHeader, "PGM pixel data truncated");
    for (long x = 0; x < w; ++x) img.at(static_cast<int>(x), static_cast<int>(y)) = row[x] / 255.0;
  }
  return img;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(img.width));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      row[x] = static_cast<unsigned char>(std::lround(img.at(x, y) * 255.0));
    out.write(reinterpret_cast<const char*>(row.data()), img.width);
  }
  if (!out) fail(Errc::IoFailure, "write failed: " + path.string());
}

// ----------------------------------------------------------------- PNG

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};

GrayImage load_png(const std::filesystem::path& path) {
  std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(Errc::IoFailure, "cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::IoFailure, "libpng init failed");
  }
  GrayImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::MalformedHeader, "corrupt PNG: " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::UnsupportedFormat, "PNG must be 8-bit grayscale: " + path.string());
  }
  img = GrayImage(static_cast<int>(w), static_cast<int>(h));
  std::vector<unsigned char> buf(static_cast<size_t>(w) * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = buf.data() + static_cast<size_t>(y) * w;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i] / 255.0;
  return img;
}

void save_png(const GrayImage& img, const std::filesystem::path& path) {
  std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(Errc::IoFailure, "cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::IoFailure, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::IoFailure, "PNG write failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(static_cast<size_t>(img.width));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      row[x] = static_cast<unsigned char>(std::lround(img.at(x, y) * 255.0));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail(Errc::IoFailure, "cannot open " + path.string());
  unsigned char magic[8] = {};
  probe.read(reinterpret_cast<char*>(magic), sizeof(magic));
  probe.close();

  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (std::memcmp(magic, png_sig, 8) == 0) return load_png(path);
  if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  if (magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '6')
    fail(Errc::UnsupportedFormat, "only binary P5 PGM is supported: " + path.string());
  fail(Errc::MalformedHeader, "unrecognized image magic in " + path.string());
}

void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format) {
  if (img.width < 1 || img.height < 1 ||
      img.data.size() != static_cast<size_t>(img.width) * img.height)
    fail(Errc::InvalidArgument, "malformed GrayImage");
  if (format == ImageFormat::Pgm)
    save_pgm(img, path);
  else
    save_png(img, path);
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  if (ext == ".png")
    save_image(img, path, ImageFormat::Png);
  else if (ext == ".pgm")
    save_image(img, path, ImageFormat::Pgm);
  else
    fail(Errc::UnsupportedFormat, "unknown image extension '" + ext + "'");
}

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) fail(Errc::InvalidArgument, "output dimensions must be >= 1");
  if (out_w == img.width && out_h == img.height) return img;

  GrayImage out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      const double top = img.at(x0, y0) * (1 - wx) + img.at(x1, y0) * wx;
      const double bot = img.at(x0, y1) * (1 - wx) + img.at(x1, y1) * wx;
      out.at(x, y) = top * (1 - wy) + bot * wy;
    }
  }
  return out;
}

}  // namespace fpsynth
