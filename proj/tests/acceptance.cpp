// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures. `acceptance --regenerate` rewrites the golden files instead of
// comparing against them.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "whorl/cli.hpp"
#include "whorl/equilibria.hpp"
#include "whorl/portrait.hpp"
#include "whorl/render.hpp"

namespace fs = std::filesystem;
using namespace whorl;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Vector2d flip(const Vector2d& z) { return {z.x(), -z.y()}; }

Vector2d at_time(const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double lo = std::min(s[i].t, s[i + 1].t), hi = std::max(s[i].t, s[i + 1].t);
    if (t >= lo && t <= hi) return hermite(s[i], s[i + 1], t);
  }
  return Vector2d::Constant(std::nan(""));
}

const std::vector<double> kThetas{-2.0, -0.9, -0.2, 0.0, 0.2, 0.9, 2.0};

Outcome equilibrium_set() {
  double worst = 0.0;
  for (double theta : kThetas) {
    const auto found = find_equilibria(whorl_family(theta), {-2.0, 2.0, -2.0, 2.0}, 1e-10);
    if (found.points.size() != 3) return {false, "theta " + num(theta) + ": " + std::to_string(found.points.size()) + " points"};
    const std::vector<Vector2d> expected{{-1, 0}, {0, 0}, {1, 0}};
    for (int i = 0; i < 3; ++i) worst = std::max(worst, (found.points[i] - expected[i]).norm());
  }
  return {worst < 1e-9, "max location error " + num(worst)};
}

Outcome origin_classes() {
  const std::vector<std::pair<double, EquilibriumKind>> cases{
      {0.0, EquilibriumKind::center},          {-0.2, EquilibriumKind::stable_focus},
      {-1.9, EquilibriumKind::stable_focus},   {0.2, EquilibriumKind::unstable_focus},
      {1.9, EquilibriumKind::unstable_focus},  {-3.0, EquilibriumKind::stable_node},
      {3.0, EquilibriumKind::unstable_node}};
  double worst = 0.0;
  for (const auto& [theta, kind] : cases) {
    const auto r = classify(whorl_family(theta), {0.0, 0.0});
    if (r.kind != kind) return {false, "theta " + num(theta) + " gave " + to_string(r.kind)};
    const auto root = std::sqrt(std::complex<double>(theta * theta - 4.0));
    const std::complex<double> l1 = (theta + root) / 2.0, l2 = (theta - root) / 2.0;
    const double e = std::min(std::max(std::abs(r.eigenvalues[0] - l1), std::abs(r.eigenvalues[1] - l2)),
                              std::max(std::abs(r.eigenvalues[0] - l2), std::abs(r.eigenvalues[1] - l1)));
    worst = std::max(worst, e);
  }
  return {worst < 1e-12, "7 kinds match, max eigenvalue error " + num(worst)};
}

Outcome cusps() {
  for (double theta : kThetas) {
    for (double x : {-1.0, 1.0}) {
      const auto r = classify(whorl_family(theta), {x, 0.0});
      const std::string where = "theta " + num(theta) + " x " + num(x);
      if (r.kind != EquilibriumKind::cusp || !r.normal_form) return {false, where + " gave " + to_string(r.kind)};
      const auto& nf = *r.normal_form;
      const double a_expected = x < 0 ? 4.0 : -4.0;
      bool ok = nf.k == 2 && std::abs(nf.a_k - a_expected) < 1e-12;
      if (theta == 0.0) {
        ok = ok && nf.b_n == 0.0 && !nf.n;
      } else {
        ok = ok && nf.n == 2 && std::abs(nf.b_n - 4.0 * theta) < 1e-12;
      }
      if (!ok) return {false, where + " normal form mismatch"};
    }
  }
  return {true, "14 cusps, k=2, a_k=+4/-4, b_n=4 theta"};
}

Outcome decision_table() {
  int total = 0, agree = 0;
  for (int k = 2; k <= 9; ++k) {
    for (double sign : {1.0, -1.0}) {
      for (double b : {0.0, 1.0, -1.0, 5.0, -5.0}) {
        for (int n = 1; n <= 9; ++n) {
          const std::optional<int> nn = b == 0.0 ? std::nullopt : std::optional<int>(n);
          if (b == 0.0 && n > 1) continue;
          ++total;
          if (to_string(classify_degenerate(NormalFormData::make(k, sign, nn, b))) ==
              oracle::double_zero_rules(k, sign, nn, b)) {
            ++agree;
          }
        }
      }
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " cases agree"};
}

Outcome conservation() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  const auto traj = integrate_adaptive(whorl_family(0.0), {0.5, 0.0}, cfg, 50.0);
  const double h0 = hamiltonian(traj.samples.front().position);
  double drift = 0.0;
  for (const auto& s : traj.samples) drift = std::max(drift, std::abs(hamiltonian(s.position) - h0));
  // The start lies on the axis moving down, so the next downward crossing closes the orbit.
  double closure = 1.0;
  for (const auto& c : axis_crossings(traj)) {
    if (c.direction < 0) {
      closure = std::abs(c.x - 0.5);
      break;
    }
  }
  return {drift < 1e-8 && closure < 1e-6, "H drift " + num(drift) + ", return error " + num(closure)};
}

Outcome separatrix_geometry() {
  IntegratorConfig cfg;
  cfg.window = Window{};
  const auto launches = launch_separatrices(whorl_family(0.0), {{-1.0, 0.0}, {1.0, 0.0}}, 1e-4, cfg, 400.0);
  double apex = 1.0, connection = 1.0;
  for (const auto& l : launches) {
    if (!l.retained) continue;
    for (const auto& c : level_crossings(l.trajectory, 0, 0.0)) {
      if (c.position.y() > 0) apex = std::min(apex, std::abs(c.position.y() - std::sqrt(1.0 / 3.0)));
    }
    for (const auto& s : l.trajectory.samples) connection = std::min(connection, (s.position + l.cusp).norm());
  }
  return {apex < 1e-3 && connection < 1e-3,
          "apex error " + num(apex) + ", closest approach to the other cusp " + num(connection)};
}

Outcome spirals() {
  const auto traj = integrate_adaptive(whorl_family(0.2), {0.01, 0.0}, {}, 60.0);
  std::vector<double> radii;
  for (const auto& c : axis_crossings(traj)) {
    if (c.direction > 0 && std::abs(c.x) < 0.9) radii.push_back(std::abs(c.x));
  }
  bool monotone = radii.size() >= 3;
  for (std::size_t i = 1; i < radii.size(); ++i) monotone = monotone && radii[i] > radii[i - 1];

  // Portraits from mirrored seeds: forward at -theta against backward at theta.
  const std::vector<Vector2d> seeds{{0.15, 0.0}, {0.3, 0.2}, {-0.45, 0.1}, {0.6, -0.3}, {-1.2, 0.9}, {1.0, -0.6}};
  std::vector<Vector2d> mirrored;
  for (const auto& s : seeds) mirrored.push_back(flip(s));
  PortraitSpec plus(whorl_family(0.2));
  plus.seeds = {SeedList{seeds}};
  PortraitSpec minus(whorl_family(-0.2));
  minus.seeds = {SeedList{mirrored}};
  const auto pp = compute_portrait(plus);
  const auto pm = compute_portrait(minus);

  double worst = 0.0;
  int matched = 0;
  for (const auto& m : pm.trajectories) {
    const Vector2d start = m.trajectory.samples.front().position;
    for (const auto& p : pp.trajectories) {
      if (p.role != m.role || p.direction == m.direction) continue;
      if (flip(p.trajectory.samples.front().position) != start) continue;
      const double span = std::min(std::abs(m.trajectory.samples.back().t), std::abs(p.trajectory.samples.back().t));
      for (double t = 0.0; t <= span; t += 0.05) {
        const double sign = m.direction == Direction::forward ? 1.0 : -1.0;
        worst = std::max(worst, (at_time(m.trajectory, sign * t) - flip(at_time(p.trajectory, -sign * t))).norm());
      }
      ++matched;
      break;
    }
  }
  const bool mirrored_ok = matched == static_cast<int>(pm.trajectories.size()) &&
                           pm.trajectories.size() == pp.trajectories.size() && worst < 1e-8;
  return {monotone && mirrored_ok, std::to_string(radii.size()) + " increasing radii, " + std::to_string(matched) +
                                       " mirrored trajectories, max deviation " + num(worst)};
}

Outcome composite() {
  const auto portrait = compute_portrait(PortraitSpec(whorl_family(0.9)));
  const auto& e = portrait.equilibria;
  const bool triple = e.size() == 3 && e[0].kind == EquilibriumKind::cusp &&
                      e[1].kind == EquilibriumKind::unstable_focus && e[2].kind == EquilibriumKind::cusp &&
                      e[1].location.norm() < 1e-9;
  const auto svg = render_svg(portrait);
  const bool emitted = svg.find("<polyline") != std::string::npos && svg.find("</svg>") != std::string::npos;
  return {triple && emitted, "cusp, unstable-focus, cusp; SVG " + std::to_string(svg.size()) + " bytes"};
}

Outcome rk4_order() {
  const auto f = whorl_family(0.5);
  const Vector2d z0(0.3, 0.1);
  IntegratorConfig tight;
  tight.rel_tol = 1e-14;
  tight.abs_tol = 1e-16;
  tight.h_min = 1e-14;
  const Vector2d ref = integrate_adaptive(f, z0, tight, 1.0).samples.back().position;
  const double ea = (integrate_fixed(f, z0, 1e-2, 1.0).samples.back().position - ref).norm();
  const double eb = (integrate_fixed(f, z0, 5e-3, 1.0).samples.back().position - ref).norm();
  const double ratio = ea / eb;
  return {std::abs(ratio - 16.0) <= 0.2 * 16.0, "error ratio " + num(ratio)};
}

// CLI invocations whose outputs are pinned by golden files.
struct Golden {
  std::string name;
  std::vector<std::string> args;  // "-" marks stdout, otherwise --out is appended
};

const std::vector<Golden> kGoldens{
    {"concentric.svg", {"portrait", "--class", "concentric", "--seeds", "ring:0.3,0.5@4", "--t-max", "8"}},
    {"spiral-ur-ll.pgm", {"orientation", "--class", "spiral-ur-ll", "--grid", "64x48"}},
    {"composite-s.csv", {"orientation", "--class", "composite-s", "--grid", "16x12"}},
    {"trajectory.csv", {"trajectory", "--class", "concentric", "--x0", "0.5", "--y0", "0", "--t-max", "10"}},
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string produce(const Golden& g, const fs::path& dir, const std::string& tag) {
  std::vector<std::string> args = g.args;
  const fs::path out = dir / (tag + "_" + g.name);
  std::ostringstream sout, serr;
  if (args.front() == "trajectory") {
    if (cli::run(args, sout, serr) != 0) return "<failed: " + serr.str() + ">";
    return sout.str();
  }
  args.insert(args.end(), {"--out", out.string()});
  if (cli::run(args, sout, serr) != 0) return "<failed: " + serr.str() + ">";
  return slurp(out);
}

Outcome format_exactness(const fs::path& golden_dir, bool regenerate) {
  const fs::path tmp = fs::temp_directory_path() / ("whorl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  std::string problem;
  for (const auto& g : kGoldens) {
    const std::string first = produce(g, tmp, "a");
    const std::string second = produce(g, tmp, "b");
    if (first != second) problem += g.name + " differs between runs; ";
    if (regenerate) {
      fs::create_directories(golden_dir);
      std::ofstream(golden_dir / g.name, std::ios::binary) << first;
    } else if (slurp(golden_dir / g.name) != first) {
      problem += g.name + " differs from golden; ";
    }
  }
  // Preset against the explicit definition of the same field.
  const std::vector<std::string> explicit_field{"--px", "y", "--py", kWhorlQ, "--param", "theta=0.2"};
  for (const auto& g : kGoldens) {
    if (std::find(g.args.begin(), g.args.end(), "spiral-ur-ll") == g.args.end()) continue;
    Golden e{g.name, {g.args.front()}};
    for (std::size_t i = 1; i < g.args.size(); ++i) {
      if (g.args[i] == "--class") {
        ++i;
        continue;
      }
      e.args.push_back(g.args[i]);
    }
    e.args.insert(e.args.end(), explicit_field.begin(), explicit_field.end());
    if (produce(e, tmp, "explicit") != produce(g, tmp, "preset")) problem += "preset/explicit mismatch; ";
  }
  Golden svg_preset{"p.svg", {"portrait", "--class", "spiral-ur-ll", "--separatrices"}};
  Golden svg_explicit{"e.svg", {"portrait", "--separatrices"}};
  svg_explicit.args.insert(svg_explicit.args.end(), explicit_field.begin(), explicit_field.end());
  if (produce(svg_preset, tmp, "x") != produce(svg_explicit, tmp, "x")) problem += "preset/explicit SVG mismatch; ";
  fs::remove_all(tmp);
  if (!problem.empty()) return {false, problem};
  return {true, std::to_string(kGoldens.size()) + (regenerate ? " golden files regenerated" : " golden files match") +
                    ", preset/explicit identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool regenerate = argc > 1 && std::string(argv[1]) == "--regenerate";
  const char* env = std::getenv("WHORL_GOLDEN_DIR");
  const fs::path golden_dir = env ? fs::path(env) : fs::path("tests/golden");

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"equilibrium set", equilibrium_set},
      {"origin classification and eigenvalues", origin_classes},
      {"cusps via normal form", cusps},
      {"degenerate decision table", decision_table},
      {"energy conservation and closed orbit", conservation},
      {"separatrix geometry", separatrix_geometry},
      {"spiral classes and mirror symmetry", spirals},
      {"composite class", composite},
      {"RK4 order", rk4_order},
      {"format exactness", [&] { return format_exactness(golden_dir, regenerate); }},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name.c_str(), o.detail.c_str());
  }
  return failures;
}
