#include "nrrd/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "nrrd/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace nrrd {

namespace {

constexpr char magic[4] = {'N', 'R', 'R', 'D'};
constexpr std::uint32_t version = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::string& buf, double v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::size_t expected_bytes(int dim, std::size_t n) {
  return 4 + 4 + 4 + 4 * static_cast<std::size_t>(dim) +
         8 * (2 * static_cast<std::size_t>(dim)) + 8 + 16 * n;
}

struct Cursor {
  const std::string& path;
  const std::vector<char>& buf;
  std::size_t pos = 0;

  void need(std::size_t bytes, std::size_t expected_total) const {
    if (pos + bytes > buf.size())
      throw FormatError("checkpoint '" + path + "': truncated, expected " +
                        std::to_string(expected_total) + " bytes, got " +
                        std::to_string(buf.size()));
  }
  std::uint32_t u32(std::size_t expected_total) {
    need(4, expected_total);
    std::uint32_t v;
    std::memcpy(&v, buf.data() + pos, 4);
    pos += 4;
    return v;
  }
  double f64(std::size_t expected_total) {
    need(8, expected_total);
    double v;
    std::memcpy(&v, buf.data() + pos, 8);
    pos += 8;
    return v;
  }
};

}  // namespace

void save_checkpoint(const StatePair& state, const std::string& path) {
  const Grid& g = *state.grid();
  std::string buf;
  buf.reserve(expected_bytes(g.dim, g.size()));
  buf.append(magic, 4);
  put_u32(buf, version);
  put_u32(buf, static_cast<std::uint32_t>(g.dim));
  put_u32(buf, static_cast<std::uint32_t>(g.nx));
  if (g.dim == 2) put_u32(buf, static_cast<std::uint32_t>(g.ny));
  put_f64(buf, g.x_lo);
  put_f64(buf, g.x_hi);
  if (g.dim == 2) {
    put_f64(buf, g.y_lo);
    put_f64(buf, g.y_hi);
  }
  put_f64(buf, state.t);
  for (double v : state.u1.v) put_f64(buf, v);
  for (double v : state.u2.v) put_f64(buf, v);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("checkpoint: cannot open '" + path + "' for writing");
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  f.flush();
  if (!f) throw FormatError("checkpoint: write failed for '" + path + "'");
}

StatePair load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("checkpoint: cannot open '" + path + "'");
  std::vector<char> buf((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());

  // minimum frame to even discover the geometry
  std::size_t expected = expected_bytes(1, 0);
  Cursor c{path, buf};
  c.need(4, expected);
  if (std::memcmp(buf.data(), magic, 4) != 0)
    throw FormatError("checkpoint '" + path + "': bad magic, not a checkpoint");
  c.pos = 4;

  const std::uint32_t ver = c.u32(expected);
  if (ver != version)
    throw FormatError("checkpoint '" + path + "': unsupported version " +
                      std::to_string(ver));
  const std::uint32_t dim = c.u32(expected);
  if (dim != 1 && dim != 2)
    throw FormatError("checkpoint '" + path + "': invalid dimension " +
                      std::to_string(dim));

  const std::uint32_t nx = c.u32(expected);
  std::uint32_t ny = 1;
  if (dim == 2) ny = c.u32(expected);
  if (nx < 3 || (dim == 2 && ny < 3) ||
      static_cast<std::uint64_t>(nx) * ny > (1u << 28))
    throw FormatError("checkpoint '" + path + "': implausible grid size");

  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  expected = expected_bytes(static_cast<int>(dim), n);
  if (buf.size() != expected)
    throw FormatError("checkpoint '" + path + "': truncated, expected " +
                      std::to_string(expected) + " bytes, got " +
                      std::to_string(buf.size()));

  const double x_lo = c.f64(expected);
  const double x_hi = c.f64(expected);
  double y_lo = 0.0, y_hi = 1.0;
  if (dim == 2) {
    y_lo = c.f64(expected);
    y_hi = c.f64(expected);
  }
  const double time = c.f64(expected);

  GridPtr grid = dim == 1 ? make_interval(x_lo, x_hi, static_cast<int>(nx))
                          : make_rectangle(x_lo, x_hi, static_cast<int>(nx),
                                           y_lo, y_hi, static_cast<int>(ny));
  StatePair s{Field(grid), Field(grid), time};
  for (std::size_t i = 0; i < n; ++i) s.u1.v[i] = c.f64(expected);
  for (std::size_t i = 0; i < n; ++i) s.u2.v[i] = c.f64(expected);
  return s;
}

StatePair load_checkpoint_on(const GridPtr& grid, const std::string& path) {
  StatePair s = load_checkpoint(path);
  if (!grid->same_layout(*s.grid()))
    throw GridMismatchError(
        "checkpoint '" + path + "' grid (" + std::to_string(s.grid()->nx) +
        "x" + std::to_string(s.grid()->ny) + ", dim " +
        std::to_string(s.grid()->dim) + ") does not match the run grid (" +
        std::to_string(grid->nx) + "x" + std::to_string(grid->ny) + ", dim " +
        std::to_string(grid->dim) + ")");
  StatePair out{Field(grid), Field(grid), s.t};
  out.u1.v = std::move(s.u1.v);
  out.u2.v = std::move(s.u2.v);
  return out;
}

}  // namespace nrrd
