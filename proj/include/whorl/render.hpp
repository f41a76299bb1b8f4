#pragma once

#include <string>
#include <vector>

#include "whorl/integrator.hpp"
#include "whorl/portrait.hpp"

namespace whorl {

struct SvgStyle {
  double stroke_width = 1.0;
  std::string streamline_color = "#2b5797";
  std::string separatrix_color = "#c0392b";
  std::string axis_color = "#b0b0b0";
  std::string glyph_color = "#000000";
  double glyph_size = 6.0;
  int canvas_width = 800;
  int canvas_height = 600;
  int precision = 3;  // decimals for viewport coordinates, in [1, 6]

  void validate() const;
};

// SVG 1.1 using only svg, polyline, circle, rect and line elements.
// Window maps affinely onto the canvas with y flipped. Glyphs: circle for
// centers and foci, filled square for nodes, cross (two lines) for cusps,
// rotated square for everything else.
std::string render_svg(const Portrait& portrait, const SvgStyle& style = {});

// Binary P5, maxval 255, top row first. Unmasked gray is
// min(254, round(255 * angle / pi)); masked cells are 255.
std::string write_pgm(const OrientationField& of);

// "row,col,x,y,angle" with an empty angle for masked cells.
std::string write_orientation_csv(const OrientationField& of);

// Header "t,x,y", shortest round-trip decimals, LF line endings.
std::string write_csv(const Trajectory& traj);

// Inverse of write_csv for the (t, x, y) columns. Throws std::invalid_argument.
std::vector<Sample> read_csv(const std::string& text);

// Shortest representation that reads back to the same double.
std::string shortest_double(double v);

}  // namespace whorl
