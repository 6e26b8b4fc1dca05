#pragma once

#include <string>

#include "nrrd/field.hpp"
#include "nrrd/series.hpp"

namespace nrrd {

// Minimal self-contained SVG plots for run diagnostics. Both writers emit a
// single standalone <svg> document; they throw FormatError when the file
// cannot be written and DomainError when there is nothing to draw.

// log10 of the sup norms of both components against time, two polylines.
void write_norm_plot(const std::string& path, const TimeSeries& series);

// Final spatial profiles of both components: the full line in 1D, the
// midline row (y closest to the domain centre) in 2D.
void write_profile_plot(const std::string& path, const StatePair& state);

}  // namespace nrrd
