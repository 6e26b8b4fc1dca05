#include "nrrd/csvio.hpp"

#include <charconv>
#include <fstream>

#include "nrrd/errors.hpp"

namespace nrrd {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* const series_csv_header =
    "t,linf_u1,linf_u2,mass_u1,mass_u2,bnd_u2,bnd_u2_gamma,mass_u1u2,dt";

std::string series_csv_string(const TimeSeries& s) {
  std::string out = series_csv_header;
  out += '\n';
  for (const SeriesRow& r : s.rows) {
    out += format_double(r.t);
    out += ',';
    out += format_double(r.linf_u1);
    out += ',';
    out += format_double(r.linf_u2);
    out += ',';
    out += format_double(r.mass_u1);
    out += ',';
    out += format_double(r.mass_u2);
    out += ',';
    out += format_double(r.bnd_u2);
    out += ',';
    out += format_double(r.bnd_u2_gamma);
    out += ',';
    out += format_double(r.mass_u1u2);
    out += ',';
    out += format_double(r.dt);
    out += '\n';
  }
  return out;
}

void write_series_csv(const std::string& path, const TimeSeries& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "' for writing");
  const std::string body = series_csv_string(s);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw FormatError("write failed for '" + path + "'");
}

}  // namespace nrrd
