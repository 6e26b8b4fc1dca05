#include "nrrd/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>

#include "nrrd/csvio.hpp"
#include "nrrd/errors.hpp"
#include "nrrd/expr.hpp"

namespace nrrd {

GridPtr GridSpec::build() const {
  if (dim == 1) return make_interval(x_lo, x_hi, nx);
  return make_rectangle(x_lo, x_hi, nx, y_lo, y_hi, ny);
}

const char* command_name(Command c) {
  switch (c) {
    case Command::eig: return "eig";
    case Command::steady: return "steady";
    case Command::evolve: return "evolve";
    case Command::threshold1: return "threshold1";
    case Command::threshold2: return "threshold2";
    case Command::sweep: return "sweep";
    case Command::check: return "check";
  }
  return "?";
}

const char* initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::zero: return "zero";
    case InitialKind::scaled_steady: return "scaled_steady";
    case InitialKind::file: return "file";
    case InitialKind::expression: return "expression";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& v, const std::string& key, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end != begin + v.size() || v.empty())
    throw ConfigError("value of '" + key + "' is not a number: '" + v + "'",
                      line);
  return x;
}

int parse_int(const std::string& v, const std::string& key, int line) {
  const double x = parse_number(v, key, line);
  if (x != std::floor(x) || std::abs(x) > 1e9)
    throw ConfigError("value of '" + key + "' is not an integer: '" + v + "'",
                      line);
  return static_cast<int>(x);
}

std::vector<double> parse_list(const std::string& v, const std::string& key,
                               int line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    const std::string item = trim(v.substr(start, comma - start));
    if (!item.empty()) out.push_back(parse_number(item, key, line));
    if (comma == v.size()) break;
    start = comma + 1;
  }
  return out;
}

struct KeyCheck {
  // constraints that span keys are checked at the end against these lines
  std::map<std::string, int> line_of;
  int record(const std::string& section_key, int line) {
    line_of[section_key] = line;
    return line;
  }
  int line(const std::string& section_key, int fallback = 0) const {
    auto it = line_of.find(section_key);
    return it == line_of.end() ? fallback : it->second;
  }
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  KeyCheck seen;
  bool have_problem = false;
  std::string section;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') {
      if (pos > text.size()) break;
      continue;
    }

    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("malformed section header: '" + s + "'", line_no);
      section = trim(s.substr(1, s.size() - 2));
      if (section == "problem") have_problem = true;
      else if (section != "grid" && section != "solver" && section != "run")
        throw ConfigError("unknown section '[" + section + "]'", line_no);
      if (pos > text.size()) break;
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value': '" + s + "'", line_no);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError("empty key", line_no);
    if (section.empty())
      throw ConfigError("key '" + key + "' outside any section", line_no);

    const std::string qual = section + "." + key;
    if (seen.line_of.count(qual))
      throw ConfigError("duplicate key '" + key + "' in [" + section + "]",
                        line_no);
    seen.record(qual, line_no);

    if (section == "problem") {
      if (key == "a") cfg.params.a = parse_number(val, key, line_no);
      else if (key == "b") cfg.params.b = parse_number(val, key, line_no);
      else if (key == "alpha") cfg.params.alpha = parse_number(val, key, line_no);
      else if (key == "beta") cfg.params.beta = parse_number(val, key, line_no);
      else if (key == "gamma") cfg.params.gamma = parse_number(val, key, line_no);
      else throw ConfigError("unknown key '" + key + "' in [problem]", line_no);
    } else if (section == "grid") {
      if (key == "dim") cfg.grid.dim = parse_int(val, key, line_no);
      else if (key == "nx") cfg.grid.nx = parse_int(val, key, line_no);
      else if (key == "ny") cfg.grid.ny = parse_int(val, key, line_no);
      else if (key == "x_lo") cfg.grid.x_lo = parse_number(val, key, line_no);
      else if (key == "x_hi") cfg.grid.x_hi = parse_number(val, key, line_no);
      else if (key == "y_lo") cfg.grid.y_lo = parse_number(val, key, line_no);
      else if (key == "y_hi") cfg.grid.y_hi = parse_number(val, key, line_no);
      else throw ConfigError("unknown key '" + key + "' in [grid]", line_no);
    } else if (section == "solver") {
      if (key == "tol_residual") cfg.solver.tol_residual = parse_number(val, key, line_no);
      else if (key == "max_iter") cfg.solver.max_iter = parse_int(val, key, line_no);
      else if (key == "relax_omega") cfg.solver.relax_omega = parse_number(val, key, line_no);
      else if (key == "newton_tol") cfg.solver.newton_tol = parse_number(val, key, line_no);
      else if (key == "dt_init") cfg.solver.dt_init = parse_number(val, key, line_no);
      else if (key == "dt_min") cfg.solver.dt_min = parse_number(val, key, line_no);
      else if (key == "dt_max") cfg.solver.dt_max = parse_number(val, key, line_no);
      else if (key == "blowup_threshold") cfg.solver.blowup_threshold = parse_number(val, key, line_no);
      else if (key == "decay_threshold") cfg.solver.decay_threshold = parse_number(val, key, line_no);
      else if (key == "sample_stride") cfg.solver.sample_stride = parse_int(val, key, line_no);
      else throw ConfigError("unknown key '" + key + "' in [solver]", line_no);
    } else {  // run
      if (key == "command") {
        if (val == "eig") cfg.command = Command::eig;
        else if (val == "steady") cfg.command = Command::steady;
        else if (val == "evolve") cfg.command = Command::evolve;
        else if (val == "threshold1") cfg.command = Command::threshold1;
        else if (val == "threshold2") cfg.command = Command::threshold2;
        else if (val == "sweep") cfg.command = Command::sweep;
        else if (val == "check") cfg.command = Command::check;
        else throw ConfigError("unknown command '" + val + "'", line_no);
      } else if (key == "ic") {
        if (val == "zero") cfg.initial.kind = InitialKind::zero;
        else if (val == "scaled_steady") cfg.initial.kind = InitialKind::scaled_steady;
        else if (val == "file") cfg.initial.kind = InitialKind::file;
        else if (val == "expression") cfg.initial.kind = InitialKind::expression;
        else throw ConfigError("unknown initial condition '" + val + "'", line_no);
      } else if (key == "ic_file") cfg.initial.path = val;
      else if (key == "ic_u1") cfg.initial.expr_u1 = val;
      else if (key == "ic_u2") cfg.initial.expr_u2 = val;
      else if (key == "outdir") cfg.outdir = val;
      else if (key == "t_end") cfg.t_end = parse_number(val, key, line_no);
      else if (key == "cutoff_m") cfg.cutoff_m = parse_number(val, key, line_no);
      else if (key == "seed_scale") cfg.seed_scale = parse_number(val, key, line_no);
      else if (key == "l1") cfg.l1 = parse_number(val, key, line_no);
      else if (key == "l2") cfg.l2 = parse_number(val, key, line_no);
      else if (key == "sweep_axis") cfg.sweep_axis = val;
      else if (key == "sweep_values") cfg.sweep_values = parse_list(val, key, line_no);
      else throw ConfigError("unknown key '" + key + "' in [run]", line_no);
    }
    if (pos > text.size()) break;
  }

  if (!have_problem) throw ConfigError("missing [problem] section", 0);

  // constraint gates, attributed to the offending key's line
  const auto fail = [&](const std::string& qual, const std::string& msg) {
    throw ConfigError(msg, seen.line(qual));
  };
  const Params& p = cfg.params;
  if (!(std::isfinite(p.a) && p.a > 0.0)) fail("problem.a", "a must be > 0");
  if (!(std::isfinite(p.b) && p.b > 0.0)) fail("problem.b", "b must be > 0");
  if (!(std::isfinite(p.alpha) && p.alpha >= 0.0))
    fail("problem.alpha", "alpha must be >= 0");
  if (!(std::isfinite(p.beta) && p.beta > 0.0))
    fail("problem.beta", "beta must be > 0");
  if (!(std::isfinite(p.gamma) && p.gamma >= 2.0))
    fail("problem.gamma", "gamma must be >= 2");

  const GridSpec& g = cfg.grid;
  if (g.dim != 1 && g.dim != 2) fail("grid.dim", "dim must be 1 or 2");
  if (g.nx < 3) fail("grid.nx", "nx must be >= 3");
  if (g.dim == 2 && g.ny < 3) fail("grid.ny", "ny must be >= 3");
  if (!(g.x_hi > g.x_lo)) fail("grid.x_hi", "need x_hi > x_lo");
  if (g.dim == 2 && !(g.y_hi > g.y_lo)) fail("grid.y_hi", "need y_hi > y_lo");

  try {
    cfg.solver.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), seen.line("solver.tol_residual",
                                          seen.line("solver.dt_init")));
  }

  if (!(std::isfinite(cfg.t_end) && cfg.t_end > 0.0))
    fail("run.t_end", "t_end must be > 0");
  if (!(std::isfinite(cfg.cutoff_m) && cfg.cutoff_m >= 0.0))
    fail("run.cutoff_m", "cutoff_m must be >= 0");
  if (!(std::isfinite(cfg.seed_scale) && cfg.seed_scale >= 0.0))
    fail("run.seed_scale", "seed_scale must be >= 0");
  if (!(std::isfinite(cfg.l1) && cfg.l1 > 0.0)) fail("run.l1", "l1 must be > 0");
  if (!(std::isfinite(cfg.l2) && cfg.l2 > 0.0)) fail("run.l2", "l2 must be > 0");
  if (cfg.outdir.empty()) fail("run.outdir", "outdir must not be empty");
  if (cfg.sweep_axis != "a" && cfg.sweep_axis != "b" &&
      cfg.sweep_axis != "alpha" && cfg.sweep_axis != "beta" &&
      cfg.sweep_axis != "gamma" && cfg.sweep_axis != "l1" &&
      cfg.sweep_axis != "l2")
    fail("run.sweep_axis", "sweep_axis must be one of a, b, alpha, beta, gamma, l1, l2");

  if (cfg.initial.kind == InitialKind::file) {
    if (cfg.initial.path.empty())
      fail("run.ic", "ic = file requires ic_file");
    if (!std::filesystem::exists(cfg.initial.path))
      fail("run.ic_file", "file '" + cfg.initial.path + "' does not exist");
  }
  if (cfg.initial.kind == InitialKind::expression) {
    try {
      (void)parse_expression(cfg.initial.expr_u1);
    } catch (const Error& e) {
      throw ConfigError(std::string("ic_u1: ") + e.what(),
                        seen.line("run.ic_u1", seen.line("run.ic")));
    }
    try {
      (void)parse_expression(cfg.initial.expr_u2);
    } catch (const Error& e) {
      throw ConfigError(std::string("ic_u2: ") + e.what(),
                        seen.line("run.ic_u2", seen.line("run.ic")));
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  const auto kv = [&out](const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
  };
  const auto kvd = [&](const char* key, double v) { kv(key, format_double(v)); };
  const auto kvi = [&](const char* key, int v) { kv(key, std::to_string(v)); };

  out += "[problem]\n";
  kvd("a", cfg.params.a);
  kvd("b", cfg.params.b);
  kvd("alpha", cfg.params.alpha);
  kvd("beta", cfg.params.beta);
  kvd("gamma", cfg.params.gamma);

  out += "\n[grid]\n";
  kvi("dim", cfg.grid.dim);
  kvi("nx", cfg.grid.nx);
  kvd("x_lo", cfg.grid.x_lo);
  kvd("x_hi", cfg.grid.x_hi);
  if (cfg.grid.dim == 2) {
    kvi("ny", cfg.grid.ny);
    kvd("y_lo", cfg.grid.y_lo);
    kvd("y_hi", cfg.grid.y_hi);
  }

  out += "\n[solver]\n";
  kvd("tol_residual", cfg.solver.tol_residual);
  kvi("max_iter", cfg.solver.max_iter);
  kvd("relax_omega", cfg.solver.relax_omega);
  kvd("newton_tol", cfg.solver.newton_tol);
  kvd("dt_init", cfg.solver.dt_init);
  kvd("dt_min", cfg.solver.dt_min);
  kvd("dt_max", cfg.solver.dt_max);
  kvd("blowup_threshold", cfg.solver.blowup_threshold);
  kvd("decay_threshold", cfg.solver.decay_threshold);
  kvi("sample_stride", cfg.solver.sample_stride);

  out += "\n[run]\n";
  kv("command", command_name(cfg.command));
  kv("ic", initial_kind_name(cfg.initial.kind));
  if (cfg.initial.kind == InitialKind::file) kv("ic_file", cfg.initial.path);
  if (cfg.initial.kind == InitialKind::expression) {
    kv("ic_u1", cfg.initial.expr_u1);
    kv("ic_u2", cfg.initial.expr_u2);
  }
  kv("outdir", cfg.outdir);
  kvd("t_end", cfg.t_end);
  kvd("cutoff_m", cfg.cutoff_m);
  kvd("seed_scale", cfg.seed_scale);
  kvd("l1", cfg.l1);
  kvd("l2", cfg.l2);
  kv("sweep_axis", cfg.sweep_axis);
  if (!cfg.sweep_values.empty()) {
    std::string list;
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
      if (i) list += ", ";
      list += format_double(cfg.sweep_values[i]);
    }
    kv("sweep_values", list);
  }
  return out;
}

}  // namespace nrrd
