#pragma once

#include <string>

#include "whorl/expression.hpp"
#include "whorl/polynomial.hpp"
#include "whorl/types.hpp"

namespace whorl {

// Polynomial planar vector field xdot = P(x, y), ydot = Q(x, y) with its
// partial derivatives precomputed symbolically.
class PlanarField {
 public:
  // Throws InvalidField if both components are the zero polynomial.
  PlanarField(Polynomial2d p, Polynomial2d q, ParamBindings params = {});

  const Polynomial2d& p() const { return p_; }
  const Polynomial2d& q() const { return q_; }
  const ParamBindings& params() const { return params_; }

  Vector2d operator()(const Vector2d& z) const {
    return {evaluate(p_, z.x(), z.y()), evaluate(q_, z.x(), z.y())};
  }

  Matrix2d jacobian(const Vector2d& z) const {
    Matrix2d j;
    j << evaluate(dp_dx_, z.x(), z.y()), evaluate(dp_dy_, z.x(), z.y()),
        evaluate(dq_dx_, z.x(), z.y()), evaluate(dq_dy_, z.x(), z.y());
    return j;
  }

  // Jacobian determinant as an exact polynomial.
  Polynomial2d jacobian_determinant() const { return dp_dx_ * dq_dy_ - dp_dy_ * dq_dx_; }

  // True when P is exactly the monomial y.
  bool is_second_order() const { return p_ == Polynomial2d::variable(Variable::y); }

 private:
  Polynomial2d p_, q_;
  Polynomial2d dp_dx_, dp_dy_, dq_dx_, dq_dy_;
  ParamBindings params_;
};

struct Jet1 {
  Vector2d value;
  Matrix2d jacobian;
};

// Right-hand side text of the whorl family, parameter "theta".
inline constexpr const char* kWhorlQ = "-x*(x^2-1)^2 + theta*y*(x^2-1)^2";

// xdot = y, ydot = -x(x^2-1)^2 + theta*y*(x^2-1)^2.
PlanarField whorl_family(double theta);

// Builds a field from text; every parameter in the text must be bound.
PlanarField field_from_text(const std::string& p_text, const std::string& q_text,
                            const ParamBindings& params = {});

inline Vector2d eval_field(const PlanarField& field, const Vector2d& z) { return field(z); }

inline Jet1 jet(const PlanarField& field, const Vector2d& z) { return {field(z), field.jacobian(z)}; }

// Conserved energy y^2/2 + (x^2-1)^3/6 of the theta = 0 member.
inline double hamiltonian(const Vector2d& z) {
  const double s = z.x() * z.x() - 1.0;
  return 0.5 * z.y() * z.y() + s * s * s / 6.0;
}

}  // namespace whorl
