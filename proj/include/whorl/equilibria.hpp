#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "whorl/field.hpp"
#include "whorl/types.hpp"

namespace whorl {

enum class EquilibriumKind {
  center,
  stable_focus,
  unstable_focus,
  stable_node,
  unstable_node,
  degenerate_node,
  saddle,
  cusp,
  saddle_node,
  elliptic_domain,
  focus_or_center,
  node_degenerate_theorem,
  not_classified,
};

// Hyphenated names, e.g. "stable-focus".
std::string to_string(EquilibriumKind kind);

enum class Stability { stable, unstable, neutral, unknown };
std::string to_string(Stability s);

// Reduced form ydot = a_k u^k [1 + ...] + b_n u^n y [1 + ...] + y^2 R about a
// double-zero equilibrium of a field with xdot = y.
struct NormalFormData {
  int k = 2;
  double a_k = 0.0;
  std::optional<int> n;  // absent exactly when b_n == 0
  double b_n = 0.0;
  int m = 1;                      // floor(k / 2)
  std::optional<double> lambda;   // b_n^2 + 4(m+1) a_k, odd k only

  static NormalFormData make(int k, double a_k, std::optional<int> n, double b_n);
};

struct EquilibriumReport {
  Vector2d location = Vector2d::Zero();
  Matrix2d jacobian = Matrix2d::Zero();
  std::array<std::complex<double>, 2> eigenvalues{};
  EquilibriumKind kind = EquilibriumKind::not_classified;
  Stability stability = Stability::unknown;
  std::optional<NormalFormData> normal_form;
  std::string diagnostic;
};

struct NewtonStall {
  Vector2d start;
  Vector2d last;
  double residual;
};

struct EquilibriumSearchOptions {
  int grid_x = 64;
  int grid_y = 64;
  int max_newton_iterations = 50;
  // Converged points closer than this are one equilibrium. Must exceed 100 * tol.
  double merge_radius = 1e-6;
};

struct EquilibriumSearch {
  std::vector<Vector2d> points;  // sorted by (x, y)
  std::vector<NewtonStall> stalls;
};

// Grid scan for candidate cells followed by damped Newton with the exact
// Jacobian. Roots with a singular Jacobian are polished on the system with the
// weaker component replaced by det J, which has a simple root there.
EquilibriumSearch find_equilibria(const PlanarField& field, const Window& window, double tol,
                                  const EquilibriumSearchOptions& options = {});

// Eigenvalues of a 2x2 matrix; complex pairs have the positive imaginary part
// first, real pairs are sorted descending.
std::array<std::complex<double>, 2> eigenvalues(const Matrix2d& jacobian);

// Zero cut for eigenvalues: |lambda| < tol * (1 + ||J||_F).
inline constexpr double kZeroEigenvalueTol = 1e-9;

struct LinearClassification {
  std::array<std::complex<double>, 2> eigenvalues;
  std::optional<EquilibriumKind> kind;  // empty: a zero eigenvalue, defer to normal forms
  Stability stability = Stability::unknown;
  int zero_eigenvalues = 0;
};

LinearClassification classify_linear(const Matrix2d& jacobian, double tol = kZeroEigenvalueTol);

// Requires field.is_second_order() and a double-zero Jacobian at eq.
// Throws NotSecondOrderShape, NotDoubleZero or FlatField.
NormalFormData extract_normal_form(const PlanarField& field, const Vector2d& eq,
                                   double tol = kZeroEigenvalueTol);

// Decision table for double-zero equilibria in normal form.
EquilibriumKind classify_degenerate(const NormalFormData& nf);

EquilibriumReport classify(const PlanarField& field, const Vector2d& eq,
                           double tol = kZeroEigenvalueTol);

}  // namespace whorl
