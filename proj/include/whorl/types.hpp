#pragma once

#include <Eigen/Core>

namespace whorl {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Vector2d = Vector2<double>;
using Matrix2d = Matrix2<double>;

// Axis-aligned closed rectangle in the phase plane.
struct Window {
  double x_min = -1.6;
  double x_max = 1.6;
  double y_min = -1.2;
  double y_max = 1.2;

  bool valid() const { return x_min < x_max && y_min < y_max; }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Vector2d& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  Window inflated(double margin) const {
    return {x_min - margin, x_max + margin, y_min - margin, y_max + margin};
  }
};

enum class Direction { forward, backward };

}  // namespace whorl
