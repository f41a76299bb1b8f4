#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <regex>

#include "whorl/render.hpp"

using namespace whorl;

namespace {

const double kPi = std::numbers::pi;

OrientationField two_by_two(std::initializer_list<double> angles) {
  OrientationField of;
  of.width = 2;
  of.height = 2;
  of.angles = AngleGrid(2, 2);
  of.mask = MaskGrid::Constant(2, 2, false);
  int i = 0;
  for (double a : angles) {
    const int r = i / 2, c = i % 2;
    if (std::isnan(a)) {
      of.mask(r, c) = true;
    }
    of.angles(r, c) = a;
    ++i;
  }
  return of;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("pgm quantization") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto pgm = write_pgm(two_by_two({0.0, kPi / 2, kPi * 255.0 / 256.0, nan}));
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 4);
  CHECK(pgm.substr(0, header.size()) == header);
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  CHECK(px[0] == 0);
  CHECK(px[1] == 128);
  CHECK(px[2] == 254);
  CHECK(px[3] == 255);
}

TEST_CASE("pgm all masked") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto pgm = write_pgm(two_by_two({nan, nan, nan, nan}));
  CHECK(pgm.substr(pgm.size() - 4) == std::string(4, '\xff'));
}

TEST_CASE("pgm of a computed field") {
  const auto of = orientation_field(whorl_family(0.2), Window{}, 33, 17);
  const auto pgm = write_pgm(of);
  const std::string header = "P5\n33 17\n255\n";
  CHECK(pgm.size() == header.size() + 33 * 17);
  // Near-pi angles never collide with the mask sentinel.
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  for (int r = 0; r < 17; ++r) {
    for (int c = 0; c < 33; ++c) CHECK((px[r * 33 + c] == 255) == of.mask(r, c));
  }
}

TEST_CASE("orientation csv") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto of = two_by_two({0.0, 0.5, nan, 1.0});
  of.window = Window{0.0, 2.0, 0.0, 2.0};
  CHECK(write_orientation_csv(of) ==
        "row,col,x,y,angle\n"
        "0,0,0.5,1.5,0\n"
        "0,1,1.5,1.5,0.5\n"
        "1,0,0.5,0.5,\n"
        "1,1,1.5,0.5,1\n");
}

TEST_CASE("trajectory csv") {
  Trajectory empty;
  CHECK(write_csv(empty) == "t,x,y\n");
  Trajectory one;
  one.samples.push_back({0.0, Vector2d(0.5, 0.0), Vector2d::Zero()});
  CHECK(write_csv(one) == "t,x,y\n0,0.5,0\n");
  CHECK(shortest_double(0.1) == "0.1");
  CHECK(shortest_double(-0.0) == "-0");
  CHECK_THROWS(read_csv("a,b,c\n"));
  CHECK_THROWS(read_csv("t,x,y\n1,2\n"));
}

TEST_CASE("property: csv round trip") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<int> len(0, 40), expo(-300, 300);
  for (int i = 0; i < 100; ++i) {
    Trajectory traj;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      traj.samples.push_back({u(rng), Vector2d(u(rng) * std::pow(10.0, expo(rng)), u(rng)), Vector2d::Zero()});
    }
    const auto back = read_csv(write_csv(traj));
    REQUIRE(back.size() == traj.samples.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
      CHECK(back[k].t == traj.samples[k].t);
      CHECK(back[k].position == traj.samples[k].position);
    }
  }
}

TEST_CASE("svg structure") {
  SUBCASE("empty portrait") {
    Portrait p;
    const auto svg = render_svg(p);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(count(svg, "<svg ") == 1);
    CHECK(count(svg, "</svg>") == 1);
    CHECK(count(svg, "class=\"axis\"") == 2);
    CHECK(count(svg, "<polyline") == 0);
    CHECK(count(svg, "<circle") == 0);
  }
  SUBCASE("one trajectory") {
    Portrait p;
    Trajectory t;
    t.samples = {{0, {0, 0}, {0, 0}}, {1, {1, 1}, {0, 0}}, {2, {-1.6, -1.2}, {0, 0}}};
    p.trajectories.push_back({t});
    const auto svg = render_svg(p);
    CHECK(count(svg, "<polyline") == 1);
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("points=\"([^\"]*)\"")));
    CHECK(m[1].str() == "400.000,300.000 650.000,50.000 0.000,600.000");
    SvgStyle style;
    style.precision = 1;
    CHECK(count(render_svg(p, style), "650.0,50.0 ") == 1);
  }
  SUBCASE("axes only when the origin is inside") {
    Portrait p;
    p.window = Window{1.0, 2.0, 1.0, 2.0};
    CHECK(count(render_svg(p), "class=\"axis\"") == 0);
  }
  SUBCASE("concentric preset glyphs") {
    const auto portrait = compute_portrait(PortraitSpec(whorl_family(0.0)));
    const auto svg = render_svg(portrait);
    CHECK(count(svg, "class=\"equilibrium cusp\"") == 4);  // two lines per cross
    CHECK(count(svg, "<circle") == 1);
    CHECK(count(svg, "<circle class=\"equilibrium center\" cx=\"400.000\" cy=\"300.000\"") == 1);
    // Cross centres at the images of (-1, 0) and (1, 0).
    CHECK(count(svg, "x1=\"147.000\" y1=\"297.000\"") == 1);
    CHECK(count(svg, "x1=\"647.000\" y1=\"297.000\"") == 1);
    CHECK(count(svg, "class=\"separatrix\"") > 0);
    CHECK(svg == render_svg(portrait));
  }
  SUBCASE("glyph shapes") {
    Portrait p;
    for (auto kind : {EquilibriumKind::stable_node, EquilibriumKind::saddle, EquilibriumKind::stable_focus}) {
      EquilibriumReport r;
      r.kind = kind;
      p.equilibria.push_back(r);
    }
    const auto svg = render_svg(p);
    CHECK(count(svg, "<rect class=\"equilibrium stable-node\"") == 1);
    CHECK(count(svg, "<rect class=\"equilibrium saddle\"") == 1);
    CHECK(count(svg, "rotate(45") == 1);
    CHECK(count(svg, "<circle class=\"equilibrium stable-focus\"") == 1);
  }
  SUBCASE("style validation") {
    SvgStyle style;
    style.precision = 7;
    CHECK_THROWS(render_svg(Portrait{}, style));
    style.precision = 3;
    style.canvas_width = 0;
    CHECK_THROWS(render_svg(Portrait{}, style));
  }
}
