#include "esi/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <zlib.h>

namespace esi {
namespace {

void push_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void push_chunk(std::vector<std::uint8_t>& out, const char type[4],
                const std::vector<std::uint8_t>& data) {
  push_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc =
      crc32(0L, out.data() + start, static_cast<uInt>(4 + data.size()));
  push_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png(const RgbImage& img, const std::string& path) {
  require(img.width > 0 && img.height > 0, ErrorCode::BadShape, "empty image");
  require(img.pixels.size() ==
              static_cast<std::size_t>(img.width) * img.height * 3,
          ErrorCode::DimMismatch, "pixel buffer size mismatch");

  const std::size_t stride = static_cast<std::size_t>(img.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = img.pixels.data() + y * stride;
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  const int rc = compress2(comp.data(), &comp_len, raw.data(),
                           static_cast<uLong>(raw.size()), 9);
  require(rc == Z_OK, ErrorCode::IoError, "zlib compression failed");
  comp.resize(comp_len);

  std::vector<std::uint8_t> out = {137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<std::uint8_t> ihdr;
  push_be32(ihdr, static_cast<std::uint32_t>(img.width));
  push_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);
  ihdr.push_back(2);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  push_chunk(out, "IHDR", ihdr);
  push_chunk(out, "IDAT", comp);
  push_chunk(out, "IEND", {});

  std::FILE* f = std::fopen(path.c_str(), "wb");
  require(f != nullptr, ErrorCode::IoError, "cannot open png file");
  const std::size_t written = std::fwrite(out.data(), 1, out.size(), f);
  std::fclose(f);
  require(written == out.size(), ErrorCode::IoError, "short png write");
}

RgbImage grayscale_image(const ScalarField& f) {
  require(f.n_rows > 0 && f.n_cols > 0, ErrorCode::BadShape, "empty field");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : f.data) {
    require(std::isfinite(v), ErrorCode::NonFiniteData, "non-finite field");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  RgbImage img(f.n_cols, f.n_rows);
  const double span = hi - lo;
  for (int y = 0; y < f.n_rows; ++y)
    for (int x = 0; x < f.n_cols; ++x) {
      const std::uint8_t g =
          span > 0.0 ? static_cast<std::uint8_t>(std::lround(
                           255.0 * (f.at(y, x) - lo) / span))
                     : 128;
      img.set(x, y, g, g, g);
    }
  return img;
}

void write_field_png(const ScalarField& f, const std::string& path) {
  write_png(grayscale_image(f), path);
}

namespace {

void draw_segment(RgbImage& img, double x0, double y0, double x1, double y1,
                  std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double steps =
      std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1.0});
  const int n = static_cast<int>(std::ceil(steps)) * 2;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const int px = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
    const int py = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
    img.set(px, py, r, g, b);
    img.set(px + 1, py, r, g, b);
    img.set(px, py + 1, r, g, b);
  }
}

}  // namespace

void write_line_plot(const std::vector<PlotSeries>& series,
                     const std::string& path, int width, int height) {
  require(!series.empty(), ErrorCode::BadShape, "no series to plot");
  require(width >= 64 && height >= 64, ErrorCode::InvalidArgument,
          "plot dimensions too small");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const PlotSeries& s : series) {
    require(s.x.size() == s.y.size() && !s.x.empty(), ErrorCode::DimMismatch,
            "series x and y lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      require(std::isfinite(s.x[i]) && std::isfinite(s.y[i]),
              ErrorCode::NonFiniteData, "non-finite plot data");
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const double pad_x = 0.03 * (x_hi - x_lo);
  const double pad_y = 0.07 * (y_hi - y_lo);
  x_lo -= pad_x;
  x_hi += pad_x;
  y_lo -= pad_y;
  y_hi += pad_y;

  RgbImage img(width, height);
  const int m = 40;
  const auto to_px = [&](double x) {
    return m + (x - x_lo) / (x_hi - x_lo) * (width - 2 * m);
  };
  const auto to_py = [&](double y) {
    return height - m - (y - y_lo) / (y_hi - y_lo) * (height - 2 * m);
  };

  for (int x = m; x <= width - m; ++x) {
    img.set(x, m, 60, 60, 60);
    img.set(x, height - m, 60, 60, 60);
  }
  for (int y = m; y <= height - m; ++y) {
    img.set(m, y, 60, 60, 60);
    img.set(width - m, y, 60, 60, 60);
  }
  for (int k = 1; k < 10; ++k) {
    const int x = m + k * (width - 2 * m) / 10;
    const int y = height - m - k * (height - 2 * m) / 10;
    for (int d = 0; d < 5; ++d) {
      img.set(x, height - m - d, 60, 60, 60);
      img.set(m + d, y, 60, 60, 60);
    }
  }

  static const std::uint8_t palette[4][3] = {
      {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}};
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    std::uint8_t r = s.r, g = s.g, b = s.b;
    if (series.size() > 1) {
      const std::uint8_t* c = palette[si % 4];
      r = c[0];
      g = c[1];
      b = c[2];
    }
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
      draw_segment(img, to_px(s.x[i]), to_py(s.y[i]), to_px(s.x[i + 1]),
                   to_py(s.y[i + 1]), r, g, b);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const int px = static_cast<int>(std::lround(to_px(s.x[i])));
      const int py = static_cast<int>(std::lround(to_py(s.y[i])));
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) img.set(px + dx, py + dy, r, g, b);
    }
  }
  write_png(img, path);
}

}  // namespace esi
