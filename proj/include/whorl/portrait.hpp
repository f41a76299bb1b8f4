#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "whorl/equilibria.hpp"
#include "whorl/field.hpp"
#include "whorl/integrator.hpp"
#include "whorl/types.hpp"

namespace whorl {

// nx * ny seeds at the cell centres of the window.
struct SeedGrid {
  int nx = 6;
  int ny = 4;
};

// count seeds per radius, evenly spaced in angle starting on the +x axis.
struct SeedRing {
  Vector2d center = Vector2d::Zero();
  std::vector<double> radii;
  int count = 8;
};

struct SeedList {
  std::vector<Vector2d> points;
};

using SeedStrategy = std::variant<SeedGrid, SeedRing, SeedList>;

// Ring seeds at radii {0.15, 0.3, 0.45, 0.6} about the origin plus a 6x4 grid.
std::vector<SeedStrategy> default_seeds();

std::vector<Vector2d> expand_seeds(const std::vector<SeedStrategy>& seeds, const Window& window);

struct TimeSpan {
  double forward = 30.0;
  double backward = 30.0;
};

struct PortraitSpec {
  explicit PortraitSpec(PlanarField f, Window w = {}) : field(std::move(f)), window(w) {}

  PlanarField field;
  Window window;
  std::vector<SeedStrategy> seeds = default_seeds();
  TimeSpan t_span;
  IntegratorConfig integrator;
  bool include_separatrices = true;
  double separatrix_eps = 1e-4;
  double separatrix_horizon = 400.0;
  double equilibrium_tol = 1e-10;
  unsigned threads = 0;  // 0: hardware concurrency
};

enum class TrajectoryRole { streamline, separatrix };

struct PortraitTrajectory {
  Trajectory trajectory;
  TrajectoryRole role = TrajectoryRole::streamline;
  Direction direction = Direction::forward;
};

struct Portrait {
  std::vector<PortraitTrajectory> trajectories;
  std::vector<EquilibriumReport> equilibria;
  Window window;
  std::vector<std::string> failures;
};

// Segments shorter than this many accepted steps inside the window are dropped.
inline constexpr std::size_t kMinSeparatrixSteps = 10;

struct SeparatrixLaunch {
  Vector2d cusp;
  Vector2d start;
  Direction direction;
  Trajectory trajectory;
  bool retained;
};

// Four launches per cusp: offsets (+-eps, 0), each in both time directions.
std::vector<SeparatrixLaunch> launch_separatrices(const PlanarField& field, const std::vector<Vector2d>& cusps,
                                                  double eps, const IntegratorConfig& config, double horizon);

// Retained launches only.
std::vector<Trajectory> trace_separatrices(const PlanarField& field, const std::vector<Vector2d>& cusps,
                                           double eps, const IntegratorConfig& config, double horizon = 400.0);

Portrait compute_portrait(const PortraitSpec& spec);

struct OrientationOptions {
  double mask_radius_fraction = 0.05;  // of the window width
  double field_floor = 1e-12;
};

using AngleGrid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Ridge angles at cell centres; row 0 is the top row (largest y). Masked
// cells hold NaN.
struct OrientationField {
  int width = 0;
  int height = 0;
  Window window;
  AngleGrid angles;
  MaskGrid mask;

  Vector2d cell_center(int row, int col) const;
};

// Direction of v reduced modulo pi into [0, pi); empty for |v| < floor.
// v and -v map to the same angle bit for bit.
std::optional<double> ridge_angle(const Vector2d& v, double floor = 1e-12);

OrientationField orientation_field(const PlanarField& field, const Window& window, int width, int height,
                                   const OrientationOptions& options = {});

}  // namespace whorl
