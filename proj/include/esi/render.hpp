#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/field.hpp"

namespace esi {

// Row-major RGB bytes, 3 per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const std::size_t k = (static_cast<std::size_t>(y) * width + x) * 3;
    pixels[k] = r;
    pixels[k + 1] = g;
    pixels[k + 2] = b;
  }
};

void write_png(const RgbImage& img, const std::string& path);

// Min-max grayscale rendering; a constant field maps to mid gray.
RgbImage grayscale_image(const ScalarField& f);
void write_field_png(const ScalarField& f, const std::string& path);

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::uint8_t r = 31;
  std::uint8_t g = 119;
  std::uint8_t b = 180;
};

// Polyline chart with an axes box and tick marks, no text labels.
void write_line_plot(const std::vector<PlotSeries>& series,
                     const std::string& path, int width = 800,
                     int height = 500);

}  // namespace esi
