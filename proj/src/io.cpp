#include "curvelab/io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace curvelab::io {

static_assert(std::endian::native == std::endian::little, "GMH1 I/O assumes a little-endian host");

std::string fmt(double v) {
  std::array<char, 32> buf;
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string fmt(std::uint64_t v) {
  std::array<char, 24> buf;
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw DataError("GMH1: truncated file");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot read " + path.string());
  return is;
}

nlohmann::json grid_json(const Grid2D& g) {
  return {{"nx", g.nx}, {"ny", g.ny}, {"dx", g.dx}, {"origin", {g.origin.x(), g.origin.y()}}};
}

}  // namespace

void write_gmh1(const std::filesystem::path& path, const Grid2D& g, const ArrayXXd& u, double t) {
  if (u.rows() != g.nx || u.cols() != g.ny) throw ParameterError("write_gmh1: shape mismatch");
  std::ofstream os = open_out(path);
  os.write("GMH1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
  put(os, g.dx);
  put(os, g.origin.x());
  put(os, g.origin.y());
  put(os, t);
  os.write(reinterpret_cast<const char*>(u.data()), static_cast<std::streamsize>(u.size() * sizeof(double)));
}

Gmh1 read_gmh1(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "GMH1", 4) != 0) throw DataError("GMH1: bad magic in " + path.string());
  const auto nx = get<std::uint32_t>(is);
  const auto ny = get<std::uint32_t>(is);
  const double dx = get<double>(is);
  const double ox = get<double>(is);
  const double oy = get<double>(is);
  Gmh1 out;
  out.time = get<double>(is);
  out.grid = Grid2D(static_cast<int>(nx), static_cast<int>(ny), dx, Point(ox, oy));
  out.u.resize(nx, ny);
  is.read(reinterpret_cast<char*>(out.u.data()), static_cast<std::streamsize>(out.u.size() * sizeof(double)));
  if (!is) throw DataError("GMH1: truncated payload in " + path.string());
  return out;
}

void write_pbm(const std::filesystem::path& path, const GridSet& s) {
  const Grid2D& g = s.grid;
  {
    std::ofstream os = open_out(path);
    os << "P4\n" << g.nx << ' ' << g.ny << '\n';
    const int row_bytes = (g.nx + 7) / 8;
    std::vector<unsigned char> row(row_bytes);
    for (int j = g.ny - 1; j >= 0; --j) {
      std::fill(row.begin(), row.end(), 0);
      for (int i = 0; i < g.nx; ++i)
        if (s.mask(i, j)) row[i / 8] |= static_cast<unsigned char>(0x80u >> (i % 8));
      os.write(reinterpret_cast<const char*>(row.data()), row_bytes);
    }
  }
  write_text(path.string() + ".json", grid_json(g).dump(2) + "\n");
}

GridSet read_pbm(const std::filesystem::path& path) {
  const auto meta = nlohmann::json::parse(read_text(path.string() + ".json"));
  const Grid2D g(meta.at("nx").get<int>(), meta.at("ny").get<int>(), meta.at("dx").get<double>(),
                 Point(meta.at("origin")[0].get<double>(), meta.at("origin")[1].get<double>()));
  std::ifstream is = open_in(path);
  std::string magic;
  int w = 0, h = 0;
  is >> magic >> w >> h;
  is.get();
  if (magic != "P4" || w != g.nx || h != g.ny) throw DataError("PBM header does not match sidecar");
  GridSet s(g);
  const int row_bytes = (g.nx + 7) / 8;
  std::vector<unsigned char> row(row_bytes);
  for (int j = g.ny - 1; j >= 0; --j) {
    is.read(reinterpret_cast<char*>(row.data()), row_bytes);
    if (!is) throw DataError("PBM: truncated payload");
    for (int i = 0; i < g.nx; ++i) s.mask(i, j) = (row[i / 8] & (0x80u >> (i % 8))) != 0;
  }
  return s;
}

void write_dat(const std::filesystem::path& path, const std::string& header,
               const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ParameterError("write_dat: column lengths differ");
  std::string text = "# " + header + "\n";
  for (std::size_t k = 0; k < x.size(); ++k) text += fmt(x[k]) + ' ' + fmt(y[k]) + '\n';
  write_text(path, text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw DataError("cannot write " + tmp.string());
    os << text;
    if (!os) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string points_csv(const std::vector<Point>& pts) {
  std::string out = "x,y\n";
  for (const Point& p : pts) out += fmt(p.x()) + ',' + fmt(p.y()) + '\n';
  return out;
}

}  // namespace curvelab::io
