#pragma once

#include "curvelab/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace curvelab::io {

/// Shortest round-trip decimal form; identical across runs and platforms.
std::string fmt(double v);
std::string fmt(std::uint64_t v);

/// GMH1 snapshot: magic "GMH1", u32 nx, u32 ny, f64 dx, f64 origin x/y,
/// f64 time, then nx * ny f64 values in row-major order (x fastest), all
/// little-endian.
void write_gmh1(const std::filesystem::path& path, const Grid2D& g, const ArrayXXd& u, double t);
struct Gmh1 {
  Grid2D grid;
  ArrayXXd u;
  double time = 0.0;
};
Gmh1 read_gmh1(const std::filesystem::path& path);

/// Mask as binary PBM (P4, row 0 at the top = largest y) plus a JSON sidecar
/// `<path>.json` with the grid metadata.
void write_pbm(const std::filesystem::path& path, const GridSet& s);
GridSet read_pbm(const std::filesystem::path& path);

/// Two-column whitespace-separated data file with a `#` header line.
void write_dat(const std::filesystem::path& path, const std::string& header,
               const std::vector<double>& x, const std::vector<double>& y);

/// Writes text atomically enough for our purposes: to a temp file, then rename.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Points as CSV `x,y`.
std::string points_csv(const std::vector<Point>& pts);

}  // namespace curvelab::io
