#pragma once

#include <string>

#include "nrrd/series.hpp"

namespace nrrd {

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

// Series CSV, schema:
//   t,linf_u1,linf_u2,mass_u1,mass_u2,bnd_u2,bnd_u2_gamma,mass_u1u2,dt
extern const char* const series_csv_header;

std::string series_csv_string(const TimeSeries& s);
void write_series_csv(const std::string& path, const TimeSeries& s);

}  // namespace nrrd
