#include "whorl/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace whorl {

namespace {

double inf_norm(const Vector2d& v) { return v.cwiseAbs().maxCoeff(); }

bool finite(const Vector2d& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

struct NewtonResult {
  Vector2d point;
  double residual;
  bool converged;
};

// Damped Newton on an arbitrary 2x2 system; halves the step while the
// residual does not decrease.
template <typename System, typename Jacobian>
NewtonResult damped_newton(const System& f, const Jacobian& jac, Vector2d z, double tol, int max_iterations) {
  Vector2d fz = f(z);
  double r = inf_norm(fz);
  if (!std::isfinite(r)) return {z, r, false};
  for (int it = 0; it < max_iterations; ++it) {
    const Matrix2d j = jac(z);
    const Vector2d delta = j.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(-fz);
    if (!finite(delta) || delta.isZero(0.0)) break;
    double damping = 1.0;
    bool improved = false;
    Vector2d trial;
    Vector2d f_trial;
    for (int halving = 0; halving < 30; ++halving) {
      trial = z + damping * delta;
      f_trial = f(trial);
      const double r_trial = inf_norm(f_trial);
      if (std::isfinite(r_trial) && r_trial < r) {
        improved = true;
        r = r_trial;
        break;
      }
      damping *= 0.5;
    }
    if (!improved) break;
    const double step = inf_norm(trial - z);
    z = trial;
    fz = f_trial;
    if (r < tol && step <= 4 * std::numeric_limits<double>::epsilon() * (1.0 + inf_norm(z))) break;
  }
  return {z, r, r < tol};
}

// Refines a converged root whose Jacobian is singular. The weaker of P, Q is
// replaced by det J, which vanishes to first order there.
Vector2d polish_singular_root(const PlanarField& field, const Vector2d& z, double tol, int max_iterations,
                              double max_shift) {
  const Matrix2d j = field.jacobian(z);
  const bool keep_p = j.row(0).norm() >= j.row(1).norm();
  const Polynomial2d det = field.jacobian_determinant();
  const Polynomial2d det_dx = differentiate(det, Variable::x);
  const Polynomial2d det_dy = differentiate(det, Variable::y);

  auto system = [&](const Vector2d& w) {
    const Vector2d fw = field(w);
    return Vector2d(keep_p ? fw.x() : fw.y(), evaluate(det, w.x(), w.y()));
  };
  auto system_jacobian = [&](const Vector2d& w) {
    Matrix2d m;
    m.row(0) = field.jacobian(w).row(keep_p ? 0 : 1);
    m(1, 0) = evaluate(det_dx, w.x(), w.y());
    m(1, 1) = evaluate(det_dy, w.x(), w.y());
    return m;
  };

  const NewtonResult polished = damped_newton(system, system_jacobian, z, tol, max_iterations);
  if (!finite(polished.point) || inf_norm(polished.point - z) > max_shift) return z;
  if (inf_norm(field(polished.point)) > std::max(tol, inf_norm(field(z)))) return z;
  return polished.point;
}

}  // namespace

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::center: return "center";
    case EquilibriumKind::stable_focus: return "stable-focus";
    case EquilibriumKind::unstable_focus: return "unstable-focus";
    case EquilibriumKind::stable_node: return "stable-node";
    case EquilibriumKind::unstable_node: return "unstable-node";
    case EquilibriumKind::degenerate_node: return "degenerate-node";
    case EquilibriumKind::saddle: return "saddle";
    case EquilibriumKind::cusp: return "cusp";
    case EquilibriumKind::saddle_node: return "saddle-node";
    case EquilibriumKind::elliptic_domain: return "elliptic-domain";
    case EquilibriumKind::focus_or_center: return "focus-or-center";
    case EquilibriumKind::node_degenerate_theorem: return "node-degenerate-theorem";
    case EquilibriumKind::not_classified: return "not-classified";
  }
  return "not-classified";
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::neutral: return "neutral";
    case Stability::unknown: return "unknown";
  }
  return "unknown";
}

NormalFormData NormalFormData::make(int k, double a_k, std::optional<int> n, double b_n) {
  if (k < 2) throw std::invalid_argument("normal form requires k >= 2");
  if (a_k == 0.0) throw std::invalid_argument("normal form requires a_k != 0");
  if (b_n == 0.0) n.reset();
  if (b_n != 0.0 && (!n || *n < 1)) throw std::invalid_argument("b_n != 0 requires n >= 1");
  NormalFormData nf;
  nf.k = k;
  nf.a_k = a_k;
  nf.n = n;
  nf.b_n = b_n;
  nf.m = k / 2;
  if (k % 2 == 1) nf.lambda = b_n * b_n + 4.0 * (nf.m + 1) * a_k;
  return nf;
}

EquilibriumSearch find_equilibria(const PlanarField& field, const Window& window, double tol,
                                  const EquilibriumSearchOptions& options) {
  if (!window.valid()) throw std::invalid_argument("equilibrium search window is empty");
  if (!(tol > 0.0)) throw std::invalid_argument("equilibrium tolerance must be positive");
  if (options.grid_x < 1 || options.grid_y < 1) throw std::invalid_argument("grid must have cells");

  const int nx = options.grid_x;
  const int ny = options.grid_y;
  const double dx = window.width() / nx;
  const double dy = window.height() / ny;
  auto node = [&](int i, int j) { return Vector2d(window.x_min + i * dx, window.y_min + j * dy); };

  std::vector<Vector2d> values((nx + 1) * (ny + 1));
  std::vector<double> residual(values.size());
  auto index = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      values[index(i, j)] = field(node(i, j));
      residual[index(i, j)] = inf_norm(values[index(i, j)]);
    }
  }

  std::vector<Vector2d> candidates;
  // Cells where both components change sign.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Vector2d lo = values[index(i, j)];
      Vector2d hi = lo;
      for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
        lo = lo.cwiseMin(values[index(i + di, j + dj)]);
        hi = hi.cwiseMax(values[index(i + di, j + dj)]);
      }
      if (lo.x() <= 0.0 && hi.x() >= 0.0 && lo.y() <= 0.0 && hi.y() >= 0.0) {
        candidates.push_back(node(i, j) + Vector2d(0.5 * dx, 0.5 * dy));
      }
    }
  }
  // Nodes where the residual is a local minimum; catches even-multiplicity
  // roots without a sign change.
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double r = residual[index(i, j)];
      bool minimum = std::isfinite(r);
      for (int dj = -1; dj <= 1 && minimum; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di;
          const int jj = j + dj;
          if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii > nx || jj > ny) continue;
          if (residual[index(ii, jj)] < r) {
            minimum = false;
            break;
          }
        }
      }
      if (minimum) candidates.push_back(node(i, j));
    }
  }

  const double merge_radius = std::max(options.merge_radius, 100.0 * tol);
  const Window accept = window.inflated(1e-9 * (1.0 + std::max(window.width(), window.height())));
  auto f = [&](const Vector2d& z) { return field(z); };
  auto jac = [&](const Vector2d& z) { return field.jacobian(z); };

  EquilibriumSearch result;
  std::vector<double> kept_residual;
  for (const Vector2d& start : candidates) {
    NewtonResult nr = damped_newton(f, jac, start, tol, options.max_newton_iterations);
    if (!nr.converged) {
      result.stalls.push_back({start, nr.point, nr.residual});
      continue;
    }
    const Eigen::JacobiSVD<Matrix2d> svd(field.jacobian(nr.point));
    const Vector2d sv = svd.singularValues();
    if (sv(1) <= 1e-6 * (1.0 + sv(0))) {
      nr.point = polish_singular_root(field, nr.point, tol, options.max_newton_iterations, merge_radius);
      nr.residual = inf_norm(field(nr.point));
    }
    if (!accept.contains(nr.point)) continue;

    bool merged = false;
    for (std::size_t k = 0; k < result.points.size(); ++k) {
      if ((result.points[k] - nr.point).norm() <= merge_radius) {
        if (nr.residual < kept_residual[k]) {
          result.points[k] = nr.point;
          kept_residual[k] = nr.residual;
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      result.points.push_back(nr.point);
      kept_residual.push_back(nr.residual);
    }
  }

  std::sort(result.points.begin(), result.points.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  return result;
}

std::array<std::complex<double>, 2> eigenvalues(const Matrix2d& j) {
  const double a = j(0, 0);
  const double b = j(0, 1);
  const double c = j(1, 0);
  const double d = j(1, 1);
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = (a - d) * (a - d) + 4.0 * b * c;
  if (disc < 0.0) {
    const double re = 0.5 * tr;
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(re, im), std::complex<double>(re, -im)};
  }
  const double s = std::sqrt(disc);
  const double big = 0.5 * (tr + std::copysign(s, tr));
  const double small = big != 0.0 ? det / big : 0.5 * (tr - std::copysign(s, tr));
  return {std::complex<double>(std::max(big, small), 0.0), std::complex<double>(std::min(big, small), 0.0)};
}

LinearClassification classify_linear(const Matrix2d& jacobian, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classification tolerance must be positive");
  LinearClassification out;
  out.eigenvalues = eigenvalues(jacobian);
  const double cut = tol * (1.0 + jacobian.norm());
  for (const auto& l : out.eigenvalues) {
    if (std::abs(l) < cut) ++out.zero_eigenvalues;
  }
  if (out.zero_eigenvalues > 0) return out;

  const auto& l1 = out.eigenvalues[0];
  const auto& l2 = out.eigenvalues[1];
  auto sign_stability = [](double re) { return re < 0.0 ? Stability::stable : Stability::unstable; };
  if (std::abs(l1 - l2) < cut) {
    out.kind = EquilibriumKind::degenerate_node;
    out.stability = sign_stability(l1.real());
  } else if (l1.imag() != 0.0) {
    if (std::abs(l1.real()) < cut) {
      out.kind = EquilibriumKind::center;
      out.stability = Stability::neutral;
    } else {
      out.kind = l1.real() < 0.0 ? EquilibriumKind::stable_focus : EquilibriumKind::unstable_focus;
      out.stability = sign_stability(l1.real());
    }
  } else if (l1.real() > 0.0 && l2.real() > 0.0) {
    out.kind = EquilibriumKind::unstable_node;
    out.stability = Stability::unstable;
  } else if (l1.real() < 0.0 && l2.real() < 0.0) {
    out.kind = EquilibriumKind::stable_node;
    out.stability = Stability::stable;
  } else {
    out.kind = EquilibriumKind::saddle;
    out.stability = Stability::unstable;
  }
  return out;
}

NormalFormData extract_normal_form(const PlanarField& field, const Vector2d& eq, double tol) {
  if (!field.is_second_order()) throw NotSecondOrderShape();
  const Matrix2d j = field.jacobian(eq);
  if (classify_linear(j, tol).zero_eigenvalues != 2) throw NotDoubleZero();

  // Q(x, y) = F(x) + y G(x) + y^2 R(x, y).
  Polynomial2d f_part;
  Polynomial2d g_part;
  for (const auto& [e, c] : field.q().terms()) {
    if (e.y == 0) f_part.add_term({e.x, 0}, c);
    if (e.y == 1) g_part.add_term({e.x, 0}, c);
  }
  const Polynomial2d f_shift = taylor_shift(f_part, eq.x(), 0.0);
  const Polynomial2d g_shift = taylor_shift(g_part, eq.x(), 0.0);

  auto lowest = [tol](const Polynomial2d& p, int min_degree) -> std::optional<std::pair<int, double>> {
    double scale = 0.0;
    for (const auto& [e, c] : p.terms()) scale = std::max(scale, std::abs(c));
    const double cut = tol * (1.0 + scale);
    for (const auto& [e, c] : p.terms()) {
      if (e.x >= min_degree && std::abs(c) > cut) return std::pair{e.x, c};
    }
    return std::nullopt;
  };

  const auto leading_f = lowest(f_shift, 2);
  if (!leading_f) throw FlatField();
  const auto leading_g = lowest(g_shift, 1);
  if (leading_g) return NormalFormData::make(leading_f->first, leading_f->second, leading_g->first, leading_g->second);
  return NormalFormData::make(leading_f->first, leading_f->second, std::nullopt, 0.0);
}

EquilibriumKind classify_degenerate(const NormalFormData& nf) {
  const int m = nf.k / 2;
  const bool has_b = nf.b_n != 0.0;
  const int n = nf.n.value_or(0);

  if (nf.k % 2 == 0) {
    if (!has_b || n >= m) return EquilibriumKind::cusp;
    return EquilibriumKind::saddle_node;
  }

  if (nf.a_k > 0.0) return EquilibriumKind::saddle;
  if (!has_b) return EquilibriumKind::focus_or_center;
  const double lambda = nf.b_n * nf.b_n + 4.0 * (m + 1) * nf.a_k;
  if (n > m || (n == m && lambda < 0.0)) return EquilibriumKind::focus_or_center;
  // Remaining: n < m, or n == m with lambda >= 0.
  return n % 2 == 0 ? EquilibriumKind::node_degenerate_theorem : EquilibriumKind::elliptic_domain;
}

EquilibriumReport classify(const PlanarField& field, const Vector2d& eq, double tol) {
  EquilibriumReport report;
  report.location = eq;
  report.jacobian = field.jacobian(eq);
  const LinearClassification linear = classify_linear(report.jacobian, tol);
  report.eigenvalues = linear.eigenvalues;
  report.stability = linear.stability;
  if (linear.kind) {
    report.kind = *linear.kind;
    return report;
  }
  if (linear.zero_eigenvalues == 1) {
    report.diagnostic = "single zero eigenvalue";
    return report;
  }
  if (report.jacobian.norm() < tol) {
    report.diagnostic = "Jacobian vanishes";
    return report;
  }
  try {
    report.normal_form = extract_normal_form(field, eq, tol);
    report.kind = classify_degenerate(*report.normal_form);
  } catch (const Error& e) {
    report.normal_form.reset();
    report.kind = EquilibriumKind::not_classified;
    report.diagnostic = e.what();
  }
  return report;
}

}  // namespace whorl
