#include "esi/field.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace esi {

namespace {

constexpr char kMagic[4] = {'E', 'F', 'D', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, ErrorCode::TruncatedFile, "short header: " + path);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_field(const ScalarField& f, const std::string& path) {
  require(f.data.size() == static_cast<std::size_t>(f.n_rows) * f.n_cols,
          ErrorCode::DimMismatch, "field shape disagrees with payload");
  for (double v : f.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData,
            "refusing to write non-finite field");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(f.n_rows));
  put_u32(out, static_cast<std::uint32_t>(f.n_cols));
  // Payload is little-endian float64, row-major; this build targets
  // little-endian hosts only.
  out.write(reinterpret_cast<const char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  require(out.good(), ErrorCode::IoError, "write failed: " + path);
}

ScalarField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  require(in.gcount() == 4, ErrorCode::TruncatedFile, "short magic: " + path);
  require(std::memcmp(magic, kMagic, 4) == 0, ErrorCode::BadMagic,
          "not an EFD1 file: " + path);
  const std::uint32_t rows = get_u32(in, path);
  const std::uint32_t cols = get_u32(in, path);
  require(rows > 0 && cols > 0 && rows < (1u << 20) && cols < (1u << 20),
          ErrorCode::BadShape, "implausible field shape: " + path);
  ScalarField f(static_cast<int>(rows), static_cast<int>(cols));
  in.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  require(in.gcount() ==
              static_cast<std::streamsize>(f.data.size() * sizeof(double)),
          ErrorCode::TruncatedFile, "short payload: " + path);
  for (double v : f.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData,
            "non-finite value in " + path);
  return f;
}

Eigen::VectorXd field_to_image(const ScalarField& f, const GridSpec& g) {
  require(f.n_rows == g.n_x && f.n_cols == g.n_x, ErrorCode::DimMismatch,
          "field shape disagrees with grid");
  const int lo = g.crop_lo();
  const int n = g.crop_n();
  Eigen::VectorXd img(static_cast<Eigen::Index>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      img[static_cast<Eigen::Index>(iy) * n + ix] = f.at(lo + iy, lo + ix);
  return img;
}

ScalarField image_to_field(const Eigen::VectorXd& img, const GridSpec& g) {
  const int lo = g.crop_lo();
  const int n = g.crop_n();
  require(img.size() == static_cast<Eigen::Index>(n) * n,
          ErrorCode::DimMismatch, "image length disagrees with crop");
  ScalarField f(g.n_x, g.n_x, 0.0);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      f.at(lo + iy, lo + ix) = img[static_cast<Eigen::Index>(iy) * n + ix];
  return f;
}

Eigen::VectorXd vectorize_components(const VectorField2& f, const GridSpec& g) {
  const Eigen::VectorXd fx = field_to_image(f.x, g);
  const Eigen::VectorXd fy = field_to_image(f.y, g);
  Eigen::VectorXd out(fx.size() + fy.size());
  out << fx, fy;
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.data) m = std::max(m, std::abs(v));
  return m;
}

double norm2(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace esi
