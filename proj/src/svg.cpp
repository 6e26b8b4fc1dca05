#include "nrrd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "nrrd/csvio.hpp"
#include "nrrd/errors.hpp"

namespace nrrd {

namespace {

constexpr double plot_w = 720.0, plot_h = 440.0;
constexpr double margin_l = 64.0, margin_r = 16.0;
constexpr double margin_t = 28.0, margin_b = 44.0;

struct Axis {
  double lo = 0.0, hi = 1.0;

  void grow(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(hi > lo)) { lo -= 0.5; hi += 0.5; }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

double px(const Axis& ax, double v) {
  return margin_l + ax.frac(v) * (plot_w - margin_l - margin_r);
}

double py(const Axis& ax, double v) {
  return plot_h - margin_b - ax.frac(v) * (plot_h - margin_t - margin_b);
}

std::string num(double v) { return format_double(v); }

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" viewBox=\"0 0 " << plot_w << " "
      << plot_h << "\">\n"
      << "<rect width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << plot_w / 2
      << "\" y=\"18\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"13\">"
      << title << "</text>\n";
}

void draw_frame(std::ostringstream& out, const Axis& ax, const Axis& ay,
                const std::string& xlabel, const std::string& ylabel) {
  const double x0 = margin_l, x1 = plot_w - margin_r;
  const double y0 = plot_h - margin_b, y1 = margin_t;
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0
      << "\" height=\"" << y0 - y1
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double fy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    out << "<text x=\"" << px(ax, fx) << "\" y=\"" << y0 + 16
        << "\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"10\">"
        << num(fx) << "</text>\n"
        << "<text x=\"" << x0 - 6 << "\" y=\"" << py(ay, fy) + 3
        << "\" text-anchor=\"end\" font-family=\"monospace\" "
           "font-size=\"10\">"
        << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << plot_h - 8
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"11\">"
      << xlabel << "</text>\n"
      << "<text x=\"14\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"11\" transform=\"rotate(-90 14 "
      << (y0 + y1) / 2 << ")\">" << ylabel << "</text>\n";
}

void draw_polyline(std::ostringstream& out, const Axis& ax, const Axis& ay,
                   const std::vector<double>& xs, const std::vector<double>& ys,
                   const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << " ";
    out << num(px(ax, xs[i])) << "," << num(py(ay, ys[i]));
  }
  out << "\"/>\n";
}

void draw_legend(std::ostringstream& out, const char* name1, const char* color1,
                 const char* name2, const char* color2) {
  const double x = plot_w - margin_r - 130.0, y = margin_t + 14.0;
  out << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24
      << "\" y2=\"" << y << "\" stroke=\"" << color1
      << "\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << x + 30 << "\" y=\"" << y + 3
      << "\" font-family=\"monospace\" font-size=\"11\">" << name1
      << "</text>\n"
      << "<line x1=\"" << x << "\" y1=\"" << y + 16 << "\" x2=\"" << x + 24
      << "\" y2=\"" << y + 16 << "\" stroke=\"" << color2
      << "\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << x + 30 << "\" y=\"" << y + 19
      << "\" font-family=\"monospace\" font-size=\"11\">" << name2
      << "</text>\n";
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("svg: cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw FormatError("svg: write to '" + path + "' failed");
}

double log_floor(double v) { return std::log10(std::max(v, 1e-300)); }

}  // namespace

void write_norm_plot(const std::string& path, const TimeSeries& series) {
  if (series.size() == 0) throw DomainError("write_norm_plot: empty series");

  std::vector<double> ts, n1, n2;
  ts.reserve(series.size());
  n1.reserve(series.size());
  n2.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    ts.push_back(series[k].t);
    n1.push_back(log_floor(series[k].linf_u1));
    n2.push_back(log_floor(series[k].linf_u2));
  }

  Axis ax, ay;
  ax.lo = ax.hi = ts.front();
  ay.lo = ay.hi = n1.front();
  for (double v : ts) ax.grow(v);
  for (double v : n1) ay.grow(v);
  for (double v : n2) ay.grow(v);
  ax.finish();
  ay.finish();

  std::ostringstream out;
  open_svg(out, "sup norms over time (log10)");
  draw_frame(out, ax, ay, "t", "log10 |u|");
  draw_polyline(out, ax, ay, ts, n1, "#c62828");
  draw_polyline(out, ax, ay, ts, n2, "#1565c0");
  draw_legend(out, "u1", "#c62828", "u2", "#1565c0");
  out << "</svg>\n";
  write_file(path, out.str());
}

void write_profile_plot(const std::string& path, const StatePair& state) {
  if (!state.grid()) throw DomainError("write_profile_plot: empty state");
  const Grid& g = *state.grid();

  // 2D: take the row whose y is closest to the centre of the domain
  int iy = 0;
  if (g.dim == 2) {
    const double yc = 0.5 * (g.y_lo + g.y_hi);
    double best = std::abs(g.y(0) - yc);
    for (int j = 1; j < g.ny; ++j) {
      const double d = std::abs(g.y(j) - yc);
      if (d < best) { best = d; iy = j; }
    }
  }

  std::vector<double> xs(g.nx), v1(g.nx), v2(g.nx);
  for (int ix = 0; ix < g.nx; ++ix) {
    const int i = g.index(ix, iy);
    xs[ix] = g.x(ix);
    v1[ix] = state.u1.v[i];
    v2[ix] = state.u2.v[i];
  }

  Axis ax, ay;
  ax.lo = ax.hi = xs.front();
  ay.lo = ay.hi = v1.front();
  for (double v : xs) ax.grow(v);
  for (double v : v1) ay.grow(v);
  for (double v : v2) ay.grow(v);
  ax.finish();
  ay.finish();

  std::ostringstream out;
  open_svg(out, g.dim == 2 ? "final profiles (midline row)" : "final profiles");
  draw_frame(out, ax, ay, "x", "u");
  draw_polyline(out, ax, ay, xs, v1, "#c62828");
  draw_polyline(out, ax, ay, xs, v2, "#1565c0");
  draw_legend(out, "u1", "#c62828", "u2", "#1565c0");
  out << "</svg>\n";
  write_file(path, out.str());
}

}  // namespace nrrd
