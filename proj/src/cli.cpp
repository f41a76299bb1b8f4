#include "whorl/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "whorl/equilibria.hpp"
#include "whorl/expression.hpp"
#include "whorl/integrator.hpp"
#include "whorl/render.hpp"

namespace whorl::cli {

namespace {

const std::map<std::string, double>& presets() {
  static const std::map<std::string, double> table{
      {"concentric", 0.0}, {"spiral-ur-ll", 0.2}, {"spiral-lr-ul", -0.2}, {"composite-s", 0.9}};
  return table;
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldSource {
  std::optional<double> theta;
  std::string preset;
  std::string px;
  std::string py;
  std::vector<std::string> params;

  void attach(CLI::App* cmd) {
    cmd->add_option("--theta", theta, "Whorl-family parameter theta");
    cmd->add_option("--class", preset, "Preset class: concentric (0), spiral-ur-ll (0.2), spiral-lr-ul (-0.2), composite-s (0.9)")
        ->check(CLI::IsMember({"concentric", "spiral-ur-ll", "spiral-lr-ul", "composite-s"}));
    cmd->add_option("--px", px,
                    "xdot as a polynomial in x, y and parameters; '*' is required, '^' takes a "
                    "nonnegative integer, -x^2 means -(x^2)");
    cmd->add_option("--py", py, "ydot, same grammar as --px");
    cmd->add_option("--param", params, "Parameter binding NAME=VALUE for --px/--py (repeatable)");
  }

  int count() const {
    return static_cast<int>(theta.has_value()) + static_cast<int>(!preset.empty()) +
           static_cast<int>(!px.empty() || !py.empty());
  }

  void validate(bool allow_none) const {
    const int n = count();
    if (n > 1) throw std::invalid_argument("give exactly one of --theta, --class, or --px/--py");
    if (n == 0 && !allow_none) throw std::invalid_argument("a field is required: --theta, --class, or --px/--py");
    if (px.empty() != py.empty()) throw std::invalid_argument("--px and --py must be given together");
    if (!params.empty() && px.empty()) throw std::invalid_argument("--param only applies to --px/--py");
  }

  ParamBindings bindings() const {
    std::vector<ParamBinding> list;
    for (const auto& p : params) list.push_back(parse_binding(p));
    return make_bindings(list);
  }

  PlanarField build() const {
    validate(false);
    if (theta) return whorl_family(*theta);
    if (!preset.empty()) return whorl_family(preset_theta(preset));
    return field_from_text(px, py, bindings());
  }
};

struct PortraitOptions {
  std::string window = "-1.6,1.6,-1.2,1.2";
  std::string seeds = "default";
  double t_max = 30.0;
  bool separatrices = false;
  int canvas_width = 800;
  int canvas_height = 600;
  int precision = 3;
  unsigned threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--window", window, "Plot window x0,x1,y0,y1");
    cmd->add_option("--seeds", seeds,
                    "Seeds: default | none | grid:NXxNY | ring:R1,R2,...@COUNT | points:x,y;x,y;...");
    cmd->add_option("--t-max", t_max, "Forward and backward horizon per seed")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--separatrices", separatrices, "Trace separatrices from cusps");
    cmd->add_option("--canvas-width", canvas_width, "SVG width in px")->check(CLI::PositiveNumber);
    cmd->add_option("--canvas-height", canvas_height, "SVG height in px")->check(CLI::PositiveNumber);
    cmd->add_option("--precision", precision, "Decimals for SVG coordinates")->check(CLI::Range(1, 6));
    cmd->add_option("--threads", threads, "Worker threads, 0 for all cores");
  }

  PortraitSpec spec(const PlanarField& field) const {
    PortraitSpec s(field, parse_window(window));
    s.seeds = parse_seeds(seeds);
    s.t_span = {t_max, t_max};
    s.include_separatrices = separatrices;
    s.threads = threads;
    return s;
  }

  SvgStyle style() const {
    SvgStyle st;
    st.canvas_width = canvas_width;
    st.canvas_height = canvas_height;
    st.precision = precision;
    return st;
  }
};

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string format_complex(const std::complex<double>& z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.6g", z.real() == 0.0 ? 0.0 : z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real() == 0.0 ? 0.0 : z.real(), z.imag());
  }
  return buf;
}

std::string format_normal_form(const std::optional<NormalFormData>& nf) {
  if (!nf) return "";
  std::ostringstream s;
  s << "k=" << nf->k << " a_k=" << nf->a_k << " n=" << (nf->n ? std::to_string(*nf->n) : "-")
    << " b_n=" << nf->b_n << " m=" << nf->m;
  if (nf->lambda) s << " lambda=" << *nf->lambda;
  return s.str();
}

const char* kind_color(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::cusp: return "\033[35m";
    case EquilibriumKind::center: return "\033[32m";
    case EquilibriumKind::not_classified: return "\033[31m";
    default: return "\033[36m";
  }
}

void print_equilibria(std::ostream& out, const PlanarField& field, const Window& window,
                      const std::vector<EquilibriumReport>& reports, bool styled) {
  out << "xdot = " << to_string(field.p()) << "\n";
  out << "ydot = " << to_string(field.q()) << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "window [%g, %g] x [%g, %g]\n\n", window.x_min, window.x_max, window.y_min,
                window.y_max);
  out << line;
  std::snprintf(line, sizeof line, "%12s %12s  %-34s %-24s %s\n", "x", "y", "eigenvalues", "kind", "normal form");
  out << line;
  for (const auto& r : reports) {
    const std::string eig = format_complex(r.eigenvalues[0]) + ", " + format_complex(r.eigenvalues[1]);
    std::string kind = to_string(r.kind);
    if (r.kind == EquilibriumKind::degenerate_node) kind += " (" + to_string(r.stability) + ")";
    char kind_cell[64];
    std::snprintf(kind_cell, sizeof kind_cell, "%-24s", kind.c_str());
    std::snprintf(line, sizeof line, "%12.6f %12.6f  %-34s ", r.location.x() == 0.0 ? 0.0 : r.location.x(),
                  r.location.y() == 0.0 ? 0.0 : r.location.y(), eig.c_str());
    out << line;
    if (styled) {
      out << kind_color(r.kind) << kind_cell << "\033[0m";
    } else {
      out << kind_cell;
    }
    out << ' ' << format_normal_form(r.normal_form);
    if (!r.diagnostic.empty()) out << (r.normal_form ? " " : "") << "(" << r.diagnostic << ")";
    out << "\n";
  }
}

std::vector<std::string> reversed(const std::vector<std::string>& args) { return {args.rbegin(), args.rend()}; }

}  // namespace

double preset_theta(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw std::invalid_argument("unknown preset class '" + name + "'");
  return it->second;
}

Window parse_window(const std::string& text) {
  const auto v = split_numbers(text, ',');
  if (v.size() != 4) throw std::invalid_argument("window must be x0,x1,y0,y1");
  const Window w{v[0], v[1], v[2], v[3]};
  if (!w.valid()) throw std::invalid_argument("window must satisfy x0 < x1 and y0 < y1");
  return w;
}

std::vector<SeedStrategy> parse_seeds(const std::string& text) {
  if (text == "default") return default_seeds();
  if (text == "none") return {};
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown seed strategy '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  if (kind == "grid") {
    const auto x = body.find('x');
    if (x == std::string::npos) throw std::invalid_argument("grid seeds must look like grid:NXxNY");
    const auto v = split_numbers(body.substr(0, x) + "," + body.substr(x + 1), ',');
    if (v.size() != 2 || v[0] < 1 || v[1] < 1 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
      throw std::invalid_argument("grid seeds need positive integer counts");
    }
    return {SeedGrid{static_cast<int>(v[0]), static_cast<int>(v[1])}};
  }
  if (kind == "ring") {
    const auto at = body.find('@');
    if (at == std::string::npos) throw std::invalid_argument("ring seeds must look like ring:R1,R2@COUNT");
    const auto count = split_numbers(body.substr(at + 1), ',');
    if (count.size() != 1 || count[0] < 1 || count[0] != std::floor(count[0])) {
      throw std::invalid_argument("ring seed count must be a positive integer");
    }
    return {SeedRing{Vector2d::Zero(), split_numbers(body.substr(0, at), ','), static_cast<int>(count[0])}};
  }
  if (kind == "points") {
    SeedList list;
    std::stringstream ss(body);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
      const auto v = split_numbers(pair, ',');
      if (v.size() != 2) throw std::invalid_argument("points must be x,y pairs separated by ';'");
      list.points.emplace_back(v[0], v[1]);
    }
    return {list};
  }
  throw std::invalid_argument("unknown seed strategy '" + kind + "'");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool styled) {
  CLI::App app{"Phase portraits, equilibria and orientation fields of polynomial planar systems.\n"
               "Built-in family: xdot = y, ydot = -x(x^2-1)^2 + theta*y(x^2-1)^2.",
               "whorl"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  FieldSource source;
  std::string window_text = "-1.6,1.6,-1.2,1.2";
  double eq_tol = 1e-10;
  auto* equilibria_cmd = app.add_subcommand("equilibria", "Find and classify equilibria");
  source.attach(equilibria_cmd);
  equilibria_cmd->add_option("--window", window_text, "Search window x0,x1,y0,y1");
  equilibria_cmd->add_option("--tol", eq_tol, "Residual tolerance")->check(CLI::PositiveNumber);

  PortraitOptions portrait_opts;
  std::string out_path;
  auto* portrait_cmd = app.add_subcommand("portrait", "Write a phase portrait as SVG");
  source.attach(portrait_cmd);
  portrait_opts.attach(portrait_cmd);
  portrait_cmd->add_option("--out", out_path, "Output SVG path")->required();

  std::string grid_text = "128x96";
  std::string format;
  auto* orientation_cmd = app.add_subcommand("orientation", "Write the orientation field as PGM or CSV");
  source.attach(orientation_cmd);
  orientation_cmd->add_option("--window", window_text, "Window x0,x1,y0,y1");
  orientation_cmd->add_option("--grid", grid_text, "Grid size WxH");
  orientation_cmd->add_option("--format", format, "pgm or csv; default from the --out extension")
      ->check(CLI::IsMember({"pgm", "csv"}));
  orientation_cmd->add_option("--out", out_path, "Output path")->required();

  double x0 = 0.0;
  double y0 = 0.0;
  double t_max = 30.0;
  bool backward = false;
  IntegratorConfig config;
  auto* trajectory_cmd = app.add_subcommand("trajectory", "Integrate one trajectory and write CSV");
  source.attach(trajectory_cmd);
  trajectory_cmd->add_option("--x0", x0, "Initial x")->required();
  trajectory_cmd->add_option("--y0", y0, "Initial y")->required();
  trajectory_cmd->add_option("--t-max", t_max, "Integration horizon")->check(CLI::NonNegativeNumber);
  trajectory_cmd->add_flag("--backward", backward, "Integrate in negative time");
  trajectory_cmd->add_option("--window", window_text, "Stop on leaving x0,x1,y0,y1");
  trajectory_cmd->add_option("--rel-tol", config.rel_tol, "Relative tolerance")->check(CLI::PositiveNumber);
  trajectory_cmd->add_option("--abs-tol", config.abs_tol, "Absolute tolerance")->check(CLI::PositiveNumber);
  trajectory_cmd->add_option("--out", out_path, "Output CSV path, '-' for stdout");

  double theta_from = -0.2;
  double theta_to = 0.9;
  int steps = 12;
  std::string out_dir;
  PortraitOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Portraits for evenly spaced theta, sweep_0000.svg, ...");
  sweep_cmd->add_option("--theta-from", theta_from, "First theta");
  sweep_cmd->add_option("--theta-to", theta_to, "Last theta");
  sweep_cmd->add_option("--steps", steps, "Number of theta values")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--px", source.px, "Custom xdot using parameter theta");
  sweep_cmd->add_option("--py", source.py, "Custom ydot using parameter theta");
  sweep_cmd->add_option("--param", source.params, "Additional bindings NAME=VALUE");
  sweep_opts.attach(sweep_cmd);
  sweep_cmd->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(reversed(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (equilibria_cmd->parsed()) {
      const PlanarField field = source.build();
      const Window window = parse_window(window_text);
      const auto search = find_equilibria(field, window, eq_tol);
      std::vector<EquilibriumReport> reports;
      for (const auto& p : search.points) reports.push_back(classify(field, p));
      print_equilibria(out, field, window, reports, styled);
      if (!search.stalls.empty()) {
        err << search.stalls.size() << " Newton start(s) did not converge\n";
      }
      return kOk;
    }

    if (portrait_cmd->parsed()) {
      const PlanarField field = source.build();
      const PortraitSpec spec = portrait_opts.spec(field);
      const Portrait portrait = compute_portrait(spec);
      for (const auto& f : portrait.failures) err << "warning: " << f << "\n";
      write_file_atomic(out_path, render_svg(portrait, portrait_opts.style()));
      return kOk;
    }

    if (orientation_cmd->parsed()) {
      const PlanarField field = source.build();
      const auto x = grid_text.find('x');
      const auto dims = x == std::string::npos
                            ? std::vector<double>{}
                            : split_numbers(grid_text.substr(0, x) + "," + grid_text.substr(x + 1), ',');
      if (dims.size() != 2 || dims[0] < 2 || dims[1] < 2 || dims[0] != std::floor(dims[0]) ||
          dims[1] != std::floor(dims[1])) {
        throw std::invalid_argument("--grid must be WxH with integers >= 2");
      }
      const OrientationField of = orientation_field(field, parse_window(window_text), static_cast<int>(dims[0]),
                                                    static_cast<int>(dims[1]));
      std::string fmt = format;
      if (fmt.empty()) fmt = std::filesystem::path(out_path).extension() == ".csv" ? "csv" : "pgm";
      write_file_atomic(out_path, fmt == "csv" ? write_orientation_csv(of) : write_pgm(of));
      return kOk;
    }

    if (trajectory_cmd->parsed()) {
      const PlanarField field = source.build();
      config.window = parse_window(window_text);
      config.validate();
      const Trajectory traj = integrate_adaptive(field, Vector2d(x0, y0), config, t_max,
                                                 backward ? Direction::backward : Direction::forward);
      if (traj.termination == Termination::step_underflow) {
        err << "integration failed: " << traj.diagnostic << "\n";
        return kNumericalError;
      }
      const std::string csv = write_csv(traj);
      if (out_path.empty() || out_path == "-") {
        out << csv;
      } else {
        write_file_atomic(out_path, csv);
      }
      return kOk;
    }

    if (sweep_cmd->parsed()) {
      source.validate(true);
      std::set<std::string> names{"theta"};
      const ParamBindings extra = source.bindings();
      for (const auto& [name, value] : extra) names.insert(name);
      std::optional<ParamPolynomial2> sym_p;
      std::optional<ParamPolynomial2> sym_q;
      if (!source.px.empty()) {
        if (extra.count("theta")) throw InvalidField("theta is swept and cannot be bound with --param");
        sym_p = parse_poly(source.px, names);
        sym_q = parse_poly(source.py, names);
      }
      // Render everything before touching the output directory.
      std::vector<std::string> svgs;
      for (int i = 0; i < steps; ++i) {
        const double theta = steps == 1 ? theta_from : theta_from + (theta_to - theta_from) * i / (steps - 1);
        ParamBindings b = extra;
        b["theta"] = theta;
        const PlanarField field = sym_p ? PlanarField(whorl::bind(*sym_p, b), whorl::bind(*sym_q, b), b) : whorl_family(theta);
        const Portrait portrait = compute_portrait(sweep_opts.spec(field));
        for (const auto& f : portrait.failures) err << "warning: theta=" << theta << ": " << f << "\n";
        svgs.push_back(render_svg(portrait, sweep_opts.style()));
      }
      std::filesystem::create_directories(out_dir);
      for (int i = 0; i < steps; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sweep_%04d.svg", i);
        write_file_atomic(std::filesystem::path(out_dir) / name, svgs[static_cast<std::size_t>(i)]);
      }
      return kOk;
    }
  } catch (const FieldError& e) {
    err << "error: " << e.what() << "\n";
    return kFieldError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kUsage;
}

}  // namespace whorl::cli
