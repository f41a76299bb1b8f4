#include "whorl/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "whorl/errors.hpp"

namespace whorl {

namespace {

bool finite(const Vector2d& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

Vector2d checked(const PlanarField& field, const Vector2d& z) {
  const Vector2d v = field(z);
  if (!finite(v)) throw NonFinite();
  return v;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

bool captured(const IntegratorConfig& config, const Vector2d& z) {
  if (!config.capture_radius) return false;
  return std::any_of(config.capture_points.begin(), config.capture_points.end(),
                     [&](const Vector2d& p) { return (p - z).norm() < *config.capture_radius; });
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::time_limit: return "time-limit";
    case Termination::left_window: return "left-window";
    case Termination::step_underflow: return "step-underflow";
    case Termination::equilibrium_capture: return "equilibrium-capture";
  }
  return "time-limit";
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max)) {
    throw std::invalid_argument("step sizes must satisfy 0 < h_min <= h_init <= h_max");
  }
  if (window && !window->valid()) throw std::invalid_argument("integration window is empty");
  if (capture_radius && !(*capture_radius > 0.0)) throw std::invalid_argument("capture radius must be positive");
}

Vector2d step_rk4(const PlanarField& field, const Vector2d& state, double h) {
  if (h == 0.0 || !std::isfinite(h)) throw std::invalid_argument("RK4 step must be nonzero and finite");
  const Vector2d k1 = checked(field, state);
  const Vector2d k2 = checked(field, state + 0.5 * h * k1);
  const Vector2d k3 = checked(field, state + 0.5 * h * k2);
  const Vector2d k4 = checked(field, state + h * k3);
  return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_fixed(const PlanarField& field, const Vector2d& state, double h, double t_max,
                           const std::optional<Window>& window) {
  if (!(h > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("fixed-step integration needs h > 0, t_max > 0");
  Trajectory traj;
  traj.samples.push_back({0.0, state, field(state)});
  if (window && !window->contains(state)) {
    traj.termination = Termination::left_window;
    return traj;
  }
  const auto steps = static_cast<long>(std::ceil(t_max / h * (1.0 - 1e-12)));
  Vector2d z = state;
  for (long k = 1; k <= steps; ++k) {
    try {
      z = step_rk4(field, z, h);
    } catch (const NonFinite& e) {
      traj.termination = Termination::step_underflow;
      traj.diagnostic = e.what();
      return traj;
    }
    traj.samples.push_back({static_cast<double>(k) * h, z, field(z)});
    if (window && !window->contains(z)) {
      traj.termination = Termination::left_window;
      return traj;
    }
  }
  traj.termination = Termination::time_limit;
  return traj;
}

Trajectory integrate_adaptive(const PlanarField& field, const Vector2d& state, const IntegratorConfig& config,
                              double t_max, Direction direction) {
  config.validate();
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be nonnegative");
  const double sign = direction == Direction::forward ? 1.0 : -1.0;
  const double t_end = sign * t_max;

  Trajectory traj;
  Vector2d z = state;
  Vector2d k1 = field(z);
  double t = 0.0;
  traj.samples.push_back({t, z, k1});
  if (!finite(z) || !finite(k1)) {
    traj.termination = Termination::step_underflow;
    traj.diagnostic = "non-finite initial state";
    return traj;
  }
  if (config.window && !config.window->contains(z)) {
    traj.termination = Termination::left_window;
    return traj;
  }
  if (captured(config, z)) {
    traj.termination = Termination::equilibrium_capture;
    return traj;
  }

  double h_abs = config.h_init;
  while (sign * (t_end - t) > 0.0) {
    double h = sign * h_abs;
    bool last = false;
    if (sign * (t + h - t_end) >= 0.0) {
      h = t_end - t;
      last = true;
    }

    const Vector2d k2 = field(z + h * (a21 * k1));
    const Vector2d k3 = field(z + h * (a31 * k1 + a32 * k2));
    const Vector2d k4 = field(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector2d k5 = field(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector2d k6 = field(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector2d z_new = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector2d k7 = field(z_new);
    const Vector2d err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    if (finite(z_new) && finite(k7) && finite(err)) {
      for (int i = 0; i < 2; ++i) {
        const double scale = config.abs_tol + config.rel_tol * std::max(std::abs(z(i)), std::abs(z_new(i)));
        err_norm = std::max(err_norm, std::abs(err(i)) / scale);
      }
    } else {
      err_norm = std::numeric_limits<double>::infinity();
    }

    if (err_norm > 1.0) {
      if (h_abs <= config.h_min) {
        traj.termination = Termination::step_underflow;
        traj.diagnostic = std::isfinite(err_norm) ? "required step below h_min" : "non-finite field value";
        return traj;
      }
      const double factor = std::isfinite(err_norm)
                                ? std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2))
                                : kMinFactor;
      h_abs = std::max(config.h_min, std::abs(h) * factor);
      continue;
    }

    t = last ? t_end : t + h;
    z = z_new;
    k1 = k7;
    traj.samples.push_back({t, z, k1});

    if (config.window && !config.window->contains(z)) {
      traj.termination = Termination::left_window;
      return traj;
    }
    if (captured(config, z)) {
      traj.termination = Termination::equilibrium_capture;
      return traj;
    }

    const double factor =
        err_norm == 0.0 ? kMaxFactor : std::min(kMaxFactor, std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2)));
    // A clamped final step says nothing about the natural step size.
    if (!last) h_abs = std::clamp(h_abs * factor, config.h_min, config.h_max);
  }
  traj.termination = Termination::time_limit;
  return traj;
}

Vector2d hermite(const Sample& a, const Sample& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * a.position + h10 * h * a.velocity + h01 * b.position + h11 * h * b.velocity;
}

std::vector<LevelCrossing> level_crossings(const Trajectory& traj, int axis, double level) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("axis must be 0 (x) or 1 (y)");
  std::vector<LevelCrossing> out;
  const auto& s = traj.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double d0 = s[i].position(axis) - level;
    const double d1 = s[i + 1].position(axis) - level;
    if (d0 == 0.0) continue;
    const int direction = d0 < 0.0 ? 1 : -1;
    if (d1 == 0.0) {
      out.push_back({s[i + 1].t, s[i + 1].position, direction});
      continue;
    }
    if ((d0 < 0.0) == (d1 < 0.0)) continue;

    // Bisection keeps lo on the d0 side.
    double lo = s[i].t;
    double hi = s[i + 1].t;
    double t_mid = lo;
    Vector2d p = s[i].position;
    for (int it = 0; it < 200; ++it) {
      t_mid = 0.5 * (lo + hi);
      p = hermite(s[i], s[i + 1], t_mid);
      const double d = p(axis) - level;
      if (std::abs(d) < 1e-12 || t_mid == lo || t_mid == hi) break;
      if ((d < 0.0) == (d0 < 0.0)) {
        lo = t_mid;
      } else {
        hi = t_mid;
      }
    }
    out.push_back({t_mid, p, direction});
  }
  return out;
}

std::vector<AxisCrossing> axis_crossings(const Trajectory& traj) {
  std::vector<AxisCrossing> out;
  for (const auto& c : level_crossings(traj, 1, 0.0)) out.push_back({c.t, c.position.x(), c.direction});
  return out;
}

}  // namespace whorl
