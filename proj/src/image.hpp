#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "common.hpp"

namespace fpsynth {

enum class ImageFormat { Pgm, Png };

// Grayscale raster with intensities in [0, 1], row-major. Immutable by
// convention once built: every operation below returns a new image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // size == width * height

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0);

  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return data.size(); }

  bool operator==(const GrayImage&) const = default;
};

// Reads an 8-bit binary PGM (P5) or 8-bit grayscale PNG; the format is sniffed
// from the file's magic bytes. Stored byte v maps to intensity v/255.
GrayImage load_image(const std::filesystem::path& path);

// Writes round(i*255) per pixel. The inverse of load_image up to 8-bit
// quantization.
void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format);

// Format chosen from the file extension (.pgm / .png).
void save_image(const GrayImage& img, const std::filesystem::path& path);

// Bilinear resampling with clamp-to-edge. Output values stay inside the
// input's [min, max] range.
GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);

}  // namespace fpsynth
