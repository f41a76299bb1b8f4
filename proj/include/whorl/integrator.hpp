#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whorl/field.hpp"
#include "whorl/types.hpp"

namespace whorl {

enum class Termination { time_limit, left_window, step_underflow, equilibrium_capture };
std::string to_string(Termination t);

struct Sample {
  double t = 0.0;
  Vector2d position = Vector2d::Zero();
  Vector2d velocity = Vector2d::Zero();  // field value, used for dense output
};

struct Trajectory {
  std::vector<Sample> samples;
  Termination termination = Termination::time_limit;
  std::string diagnostic;
};

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double h_init = 1e-2;
  double h_min = 1e-12;
  double h_max = 0.05;
  std::optional<Window> window;
  std::optional<double> capture_radius = 1e-6;
  std::vector<Vector2d> capture_points;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

// One classical fourth-order Runge-Kutta step; h may be negative.
// Throws NonFinite if a stage evaluates to a non-finite value.
Vector2d step_rk4(const PlanarField& field, const Vector2d& state, double h);

// ceil(t_max / h) RK4 steps of size h, stopping early on window exit.
Trajectory integrate_fixed(const PlanarField& field, const Vector2d& state, double h, double t_max,
                           const std::optional<Window>& window = std::nullopt);

// Dormand-Prince 5(4) with local error control
//   |err_i| <= abs_tol + rel_tol * max(|y_i|, |y_new_i|).
Trajectory integrate_adaptive(const PlanarField& field, const Vector2d& state, const IntegratorConfig& config,
                              double t_max, Direction direction = Direction::forward);

// Cubic Hermite interpolant on the segment [a, b] at time t.
Vector2d hermite(const Sample& a, const Sample& b, double t);

struct AxisCrossing {
  double t;
  double x;
  int direction;  // +1 when y goes from negative to positive, -1 otherwise
};

// Sign changes of y, refined by bisection on the Hermite segment to |y| < 1e-12.
std::vector<AxisCrossing> axis_crossings(const Trajectory& traj);

struct LevelCrossing {
  double t;
  Vector2d position;
  int direction;  // +1 when the coordinate increases through the level
};

// Points where coordinate `axis` (0 for x, 1 for y) passes through `level`,
// refined on the Hermite segment to within 1e-12 of the level.
std::vector<LevelCrossing> level_crossings(const Trajectory& traj, int axis, double level);

}  // namespace whorl
