#include "whorl/portrait.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace whorl {

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers. Each job writes only
// its own output slot, so merge order is index order.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  }
}

std::size_t steps_inside(const Trajectory& traj) {
  if (traj.samples.size() < 2) return 0;
  const std::size_t steps = traj.samples.size() - 1;
  return traj.termination == Termination::left_window ? steps - 1 : steps;
}

}  // namespace

std::vector<SeedStrategy> default_seeds() {
  return {SeedRing{Vector2d::Zero(), {0.15, 0.3, 0.45, 0.6}, 8}, SeedGrid{6, 4}};
}

std::vector<Vector2d> expand_seeds(const std::vector<SeedStrategy>& seeds, const Window& window) {
  std::vector<Vector2d> points;
  for (const auto& strategy : seeds) {
    if (const auto* grid = std::get_if<SeedGrid>(&strategy)) {
      if (grid->nx < 1 || grid->ny < 1) throw std::invalid_argument("seed grid needs at least one cell");
      const double dx = window.width() / grid->nx;
      const double dy = window.height() / grid->ny;
      for (int j = 0; j < grid->ny; ++j) {
        for (int i = 0; i < grid->nx; ++i) {
          points.emplace_back(window.x_min + (i + 0.5) * dx, window.y_min + (j + 0.5) * dy);
        }
      }
    } else if (const auto* ring = std::get_if<SeedRing>(&strategy)) {
      if (ring->count < 1) throw std::invalid_argument("seed ring needs at least one seed");
      for (double r : ring->radii) {
        for (int k = 0; k < ring->count; ++k) {
          const double phi = 2.0 * std::numbers::pi * k / ring->count;
          points.push_back(ring->center + r * Vector2d(std::cos(phi), std::sin(phi)));
        }
      }
    } else {
      const auto& list = std::get<SeedList>(strategy);
      points.insert(points.end(), list.points.begin(), list.points.end());
    }
  }
  return points;
}

std::vector<SeparatrixLaunch> launch_separatrices(const PlanarField& field, const std::vector<Vector2d>& cusps,
                                                  double eps, const IntegratorConfig& config, double horizon) {
  if (!(eps > 0.0)) throw std::invalid_argument("separatrix offset must be positive");
  std::vector<SeparatrixLaunch> launches;
  for (const Vector2d& cusp : cusps) {
    for (double offset : {-eps, eps}) {
      for (Direction dir : {Direction::forward, Direction::backward}) {
        SeparatrixLaunch launch{cusp, cusp + Vector2d(offset, 0.0), dir, {}, false};
        launches.push_back(std::move(launch));
      }
    }
  }
  parallel_for(launches.size(), 0, [&](std::size_t i) {
    auto& l = launches[i];
    l.trajectory = integrate_adaptive(field, l.start, config, horizon, l.direction);
    l.retained = steps_inside(l.trajectory) >= kMinSeparatrixSteps;
  });
  return launches;
}

std::vector<Trajectory> trace_separatrices(const PlanarField& field, const std::vector<Vector2d>& cusps,
                                           double eps, const IntegratorConfig& config, double horizon) {
  std::vector<Trajectory> out;
  for (auto& launch : launch_separatrices(field, cusps, eps, config, horizon)) {
    if (launch.retained) out.push_back(std::move(launch.trajectory));
  }
  return out;
}

Portrait compute_portrait(const PortraitSpec& spec) {
  if (!spec.window.valid()) throw std::invalid_argument("portrait window is empty");
  if (spec.t_span.forward < 0.0 || spec.t_span.backward < 0.0) {
    throw std::invalid_argument("portrait horizons must be nonnegative");
  }

  Portrait portrait;
  portrait.window = spec.window;
  const EquilibriumSearch search = find_equilibria(spec.field, spec.window, spec.equilibrium_tol);
  for (const Vector2d& eq : search.points) portrait.equilibria.push_back(classify(spec.field, eq));

  IntegratorConfig config = spec.integrator;
  if (!config.window) config.window = spec.window;
  config.capture_points = search.points;

  struct Job {
    Vector2d start;
    Direction direction;
    double horizon;
  };
  std::vector<Job> jobs;
  for (const Vector2d& seed : expand_seeds(spec.seeds, spec.window)) {
    if (spec.t_span.forward > 0.0) jobs.push_back({seed, Direction::forward, spec.t_span.forward});
    if (spec.t_span.backward > 0.0) jobs.push_back({seed, Direction::backward, spec.t_span.backward});
  }
  std::vector<Trajectory> traced(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
    traced[i] = integrate_adaptive(spec.field, jobs[i].start, config, jobs[i].horizon, jobs[i].direction);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (traced[i].termination == Termination::step_underflow) {
      portrait.failures.push_back("seed " + std::to_string(i) + ": " + traced[i].diagnostic);
    }
    if (traced[i].samples.size() < 2) continue;
    portrait.trajectories.push_back({std::move(traced[i]), TrajectoryRole::streamline, jobs[i].direction});
  }

  if (spec.include_separatrices) {
    std::vector<Vector2d> cusps;
    for (const auto& report : portrait.equilibria) {
      if (report.kind == EquilibriumKind::cusp) cusps.push_back(report.location);
    }
    for (auto& launch :
         launch_separatrices(spec.field, cusps, spec.separatrix_eps, config, spec.separatrix_horizon)) {
      if (launch.trajectory.termination == Termination::step_underflow) {
        portrait.failures.push_back("separatrix: " + launch.trajectory.diagnostic);
      }
      if (!launch.retained) continue;
      portrait.trajectories.push_back({std::move(launch.trajectory), TrajectoryRole::separatrix, launch.direction});
    }
  }
  return portrait;
}

Vector2d OrientationField::cell_center(int row, int col) const {
  const double dx = window.width() / width;
  const double dy = window.height() / height;
  return {window.x_min + (col + 0.5) * dx, window.y_max - (row + 0.5) * dy};
}

std::optional<double> ridge_angle(const Vector2d& v, double floor) {
  if (!(v.norm() >= floor) || v.isZero(0.0)) return std::nullopt;
  const Vector2d u = (v.y() < 0.0 || (v.y() == 0.0 && v.x() < 0.0)) ? Vector2d(-v) : v;
  double a = std::atan2(u.y(), u.x());
  if (a <= 0.0 || a >= std::numbers::pi) a = 0.0;
  return a;
}

OrientationField orientation_field(const PlanarField& field, const Window& window, int width, int height,
                                   const OrientationOptions& options) {
  if (width < 2 || height < 2) throw std::invalid_argument("orientation grid must be at least 2x2");
  if (!window.valid()) throw std::invalid_argument("orientation window is empty");

  OrientationField of;
  of.width = width;
  of.height = height;
  of.window = window;
  of.angles.setConstant(height, width, std::numeric_limits<double>::quiet_NaN());
  of.mask.setConstant(height, width, false);

  const double mask_radius = options.mask_radius_fraction * window.width();
  const auto equilibria = find_equilibria(field, window.inflated(mask_radius), 1e-10).points;

  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const Vector2d c = of.cell_center(row, col);
      const bool near_equilibrium = std::any_of(equilibria.begin(), equilibria.end(),
                                                [&](const Vector2d& e) { return (e - c).norm() < mask_radius; });
      const auto angle = near_equilibrium ? std::nullopt : ridge_angle(field(c), options.field_floor);
      if (angle) {
        of.angles(row, col) = *angle;
      } else {
        of.mask(row, col) = true;
      }
    }
  }
  return of;
}

}  // namespace whorl
