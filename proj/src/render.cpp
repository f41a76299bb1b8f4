#include "whorl/render.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace whorl {

namespace {

class Viewport {
 public:
  Viewport(const Window& w, const SvgStyle& s) : window_(w), style_(s) {}

  double sx(double x) const { return (x - window_.x_min) / window_.width() * style_.canvas_width; }
  double sy(double y) const { return (window_.y_max - y) / window_.height() * style_.canvas_height; }

  std::string num(double v) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", style_.precision, v);
    std::string s(buf);
    // "-0.000" and "0.000" are the same coordinate.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
  }

 private:
  Window window_;
  SvgStyle style_;
};

enum class Glyph { circle, square, cross, diamond };

Glyph glyph_for(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::center:
    case EquilibriumKind::stable_focus:
    case EquilibriumKind::unstable_focus:
    case EquilibriumKind::focus_or_center:
      return Glyph::circle;
    case EquilibriumKind::stable_node:
    case EquilibriumKind::unstable_node:
    case EquilibriumKind::degenerate_node:
    case EquilibriumKind::node_degenerate_theorem:
      return Glyph::square;
    case EquilibriumKind::cusp:
      return Glyph::cross;
    default:
      return Glyph::diamond;
  }
}

}  // namespace

void SvgStyle::validate() const {
  if (!(stroke_width > 0.0) || !(glyph_size > 0.0) || canvas_width <= 0 || canvas_height <= 0) {
    throw std::invalid_argument("SVG dimensions must be positive");
  }
  if (precision < 1 || precision > 6) throw std::invalid_argument("SVG precision must be in [1, 6]");
}

std::string render_svg(const Portrait& portrait, const SvgStyle& style) {
  style.validate();
  if (!portrait.window.valid()) throw std::invalid_argument("portrait window is empty");
  const Viewport vp(portrait.window, style);
  const std::string sw = vp.num(style.stroke_width);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.canvas_width
      << "\" height=\"" << style.canvas_height << "\" viewBox=\"0 0 " << style.canvas_width << ' '
      << style.canvas_height << "\">\n";

  const Window& w = portrait.window;
  if (w.y_min <= 0.0 && w.y_max >= 0.0) {
    out << "<line class=\"axis\" x1=\"" << vp.num(0.0) << "\" y1=\"" << vp.num(vp.sy(0.0)) << "\" x2=\""
        << vp.num(style.canvas_width) << "\" y2=\"" << vp.num(vp.sy(0.0)) << "\" stroke=\"" << style.axis_color
        << "\" stroke-width=\"" << sw << "\"/>\n";
  }
  if (w.x_min <= 0.0 && w.x_max >= 0.0) {
    out << "<line class=\"axis\" x1=\"" << vp.num(vp.sx(0.0)) << "\" y1=\"" << vp.num(0.0) << "\" x2=\""
        << vp.num(vp.sx(0.0)) << "\" y2=\"" << vp.num(style.canvas_height) << "\" stroke=\"" << style.axis_color
        << "\" stroke-width=\"" << sw << "\"/>\n";
  }

  for (const auto& pt : portrait.trajectories) {
    const bool separatrix = pt.role == TrajectoryRole::separatrix;
    out << "<polyline class=\"" << (separatrix ? "separatrix" : "streamline") << "\" fill=\"none\" stroke=\""
        << (separatrix ? style.separatrix_color : style.streamline_color) << "\" stroke-width=\"" << sw
        << "\" points=\"";
    // Consecutive samples that print identically add nothing to the path.
    std::string previous;
    for (const auto& s : pt.trajectory.samples) {
      std::string point = vp.num(vp.sx(s.position.x())) + ',' + vp.num(vp.sy(s.position.y()));
      if (point == previous) continue;
      if (!previous.empty()) out << ' ';
      out << point;
      previous = std::move(point);
    }
    out << "\"/>\n";
  }

  const double g = style.glyph_size;
  for (const auto& eq : portrait.equilibria) {
    const double cx = vp.sx(eq.location.x());
    const double cy = vp.sy(eq.location.y());
    const std::string cls = "equilibrium " + to_string(eq.kind);
    switch (glyph_for(eq.kind)) {
      case Glyph::circle:
        out << "<circle class=\"" << cls << "\" cx=\"" << vp.num(cx) << "\" cy=\"" << vp.num(cy) << "\" r=\""
            << vp.num(0.5 * g) << "\" fill=\"none\" stroke=\"" << style.glyph_color << "\" stroke-width=\"" << sw
            << "\"/>\n";
        break;
      case Glyph::square:
        out << "<rect class=\"" << cls << "\" x=\"" << vp.num(cx - 0.5 * g) << "\" y=\"" << vp.num(cy - 0.5 * g)
            << "\" width=\"" << vp.num(g) << "\" height=\"" << vp.num(g) << "\" fill=\"" << style.glyph_color
            << "\"/>\n";
        break;
      case Glyph::cross:
        for (double d : {1.0, -1.0}) {
          out << "<line class=\"" << cls << "\" x1=\"" << vp.num(cx - 0.5 * g) << "\" y1=\""
              << vp.num(cy - 0.5 * g * d) << "\" x2=\"" << vp.num(cx + 0.5 * g) << "\" y2=\""
              << vp.num(cy + 0.5 * g * d) << "\" stroke=\"" << style.glyph_color << "\" stroke-width=\"" << sw
              << "\"/>\n";
        }
        break;
      case Glyph::diamond:
        out << "<rect class=\"" << cls << "\" x=\"" << vp.num(cx - 0.5 * g) << "\" y=\"" << vp.num(cy - 0.5 * g)
            << "\" width=\"" << vp.num(g) << "\" height=\"" << vp.num(g) << "\" transform=\"rotate(45 "
            << vp.num(cx) << ' ' << vp.num(cy) << ")\" fill=\"none\" stroke=\"" << style.glyph_color
            << "\" stroke-width=\"" << sw << "\"/>\n";
        break;
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string write_pgm(const OrientationField& of) {
  std::string out = "P5\n" + std::to_string(of.width) + ' ' + std::to_string(of.height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(of.width) * of.height);
  std::size_t k = header;
  for (int row = 0; row < of.height; ++row) {
    for (int col = 0; col < of.width; ++col) {
      unsigned char gray = 255;
      const double a = of.angles(row, col);
      if (!of.mask(row, col) && std::isfinite(a)) {
        double reduced = std::fmod(a, std::numbers::pi);
        if (reduced < 0.0) reduced += std::numbers::pi;
        if (reduced >= std::numbers::pi) reduced = 0.0;
        gray = static_cast<unsigned char>(std::min(254.0, std::round(255.0 * reduced / std::numbers::pi)));
      }
      out[k++] = static_cast<char>(gray);
    }
  }
  return out;
}

std::string write_orientation_csv(const OrientationField& of) {
  std::string out = "row,col,x,y,angle\n";
  for (int row = 0; row < of.height; ++row) {
    for (int col = 0; col < of.width; ++col) {
      const Vector2d c = of.cell_center(row, col);
      out += std::to_string(row) + ',' + std::to_string(col) + ',' + shortest_double(c.x()) + ',' +
             shortest_double(c.y()) + ',';
      if (!of.mask(row, col)) out += shortest_double(of.angles(row, col));
      out += '\n';
    }
  }
  return out;
}

std::string shortest_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

std::string write_csv(const Trajectory& traj) {
  std::string out = "t,x,y\n";
  for (const auto& s : traj.samples) {
    out += shortest_double(s.t) + ',' + shortest_double(s.position.x()) + ',' + shortest_double(s.position.y()) + '\n';
  }
  return out;
}

std::vector<Sample> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y") throw std::invalid_argument("missing t,x,y header");
  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 3; ++i) {
      auto [next, ec] = std::from_chars(p, end, v[i]);
      if (ec != std::errc()) throw std::invalid_argument("bad CSV number: " + line);
      p = next;
      if (i < 2) {
        if (p == end || *p != ',') throw std::invalid_argument("bad CSV row: " + line);
        ++p;
      }
    }
    if (p != end) throw std::invalid_argument("trailing data in CSV row: " + line);
    samples.push_back({v[0], Vector2d(v[1], v[2]), Vector2d::Zero()});
  }
  return samples;
}

}  // namespace whorl
