#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "whorl/errors.hpp"

namespace whorl {

// Exponent pair of the monomial x^x * y^y.
struct Exponent {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Exponent&, const Exponent&) = default;
  int total() const { return x + y; }
};

enum class Variable { x, y };

inline bool is_zero(double c) { return c == 0.0; }

// Coefficient that is itself a polynomial in named parameters, e.g. 0.5*theta^2 - 3.
// Zero terms are never stored, so the empty map is the zero coefficient.
class ParamCoefficient {
 public:
  using ParamMonomial = std::map<std::string, int>;
  using Terms = std::map<ParamMonomial, double>;

  ParamCoefficient() = default;
  ParamCoefficient(double c) {  // NOLINT(google-explicit-constructor)
    add_term({}, c);
  }
  static ParamCoefficient parameter(const std::string& name) {
    ParamCoefficient p;
    p.add_term({{name, 1}}, 1.0);
    return p;
  }

  const Terms& terms() const { return terms_; }

  void add_term(const ParamMonomial& m, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  ParamCoefficient& operator+=(const ParamCoefficient& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  ParamCoefficient& operator-=(const ParamCoefficient& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend ParamCoefficient operator+(ParamCoefficient a, const ParamCoefficient& b) { return a += b; }
  friend ParamCoefficient operator-(ParamCoefficient a, const ParamCoefficient& b) { return a -= b; }
  friend ParamCoefficient operator-(const ParamCoefficient& a) {
    ParamCoefficient r;
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
    return r;
  }
  friend ParamCoefficient operator*(const ParamCoefficient& a, const ParamCoefficient& b) {
    ParamCoefficient r;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        ParamMonomial m = ma;
        for (const auto& [name, e] : mb) m[name] += e;
        r.add_term(m, ca * cb);
      }
    }
    return r;
  }
  friend ParamCoefficient operator*(const ParamCoefficient& a, double s) {
    ParamCoefficient r;
    for (const auto& [m, c] : a.terms_) r.add_term(m, c * s);
    return r;
  }
  friend bool operator==(const ParamCoefficient&, const ParamCoefficient&) = default;

  // Value under a complete set of bindings; throws UnboundParam otherwise.
  template <typename Bindings>
  double value(const Bindings& bindings) const {
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
      double term = c;
      for (const auto& [name, e] : m) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw UnboundParam(name);
        for (int k = 0; k < e; ++k) term *= it->second;
      }
      sum += term;
    }
    return sum;
  }

 private:
  Terms terms_;
};

inline bool is_zero(const ParamCoefficient& c) { return c.terms().empty(); }

// Bivariate polynomial in canonical form: a sorted exponent -> coefficient map
// with no zero coefficients. Structural equality is mathematical equality.
template <typename Scalar>
class Polynomial2 {
 public:
  using Terms = std::map<Exponent, Scalar>;

  Polynomial2() = default;

  static Polynomial2 constant(const Scalar& c) { return monomial({0, 0}, c); }
  static Polynomial2 monomial(Exponent e, const Scalar& c) {
    Polynomial2 p;
    p.add_term(e, c);
    return p;
  }
  static Polynomial2 variable(Variable v) {
    return monomial(v == Variable::x ? Exponent{1, 0} : Exponent{0, 1}, Scalar(1.0));
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // -1 for the zero polynomial.
  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.total());
    return d;
  }

  Scalar coefficient(Exponent e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0.0) : it->second;
  }

  void add_term(Exponent e, const Scalar& c) {
    if (e.x < 0 || e.y < 0) throw std::invalid_argument("negative exponent");
    using whorl::is_zero;
    if (is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial2& operator+=(const Polynomial2& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial2& operator-=(const Polynomial2& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Polynomial2 operator+(Polynomial2 a, const Polynomial2& b) { return a += b; }
  friend Polynomial2 operator-(Polynomial2 a, const Polynomial2& b) { return a -= b; }
  friend Polynomial2 operator-(const Polynomial2& a) {
    Polynomial2 r;
    for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, -c);
    return r;
  }
  friend Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b) {
    Polynomial2 r;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) r.add_term({ea.x + eb.x, ea.y + eb.y}, ca * cb);
    }
    return r;
  }
  Polynomial2& operator*=(const Polynomial2& o) { return *this = *this * o; }
  friend bool operator==(const Polynomial2&, const Polynomial2&) = default;

  Polynomial2 pow(unsigned n) const {
    Polynomial2 result = constant(Scalar(1.0));
    Polynomial2 base = *this;
    while (n > 0) {
      if (n & 1u) result *= base;
      n >>= 1u;
      if (n > 0) base *= base;
    }
    return result;
  }

 private:
  Terms terms_;
};

using Polynomial2d = Polynomial2<double>;
using ParamPolynomial2 = Polynomial2<ParamCoefficient>;

template <typename Scalar>
Polynomial2<Scalar> differentiate(const Polynomial2<Scalar>& p, Variable v) {
  Polynomial2<Scalar> r;
  for (const auto& [e, c] : p.terms()) {
    const int power = v == Variable::x ? e.x : e.y;
    if (power == 0) continue;
    const Exponent lowered = v == Variable::x ? Exponent{e.x - 1, e.y} : Exponent{e.x, e.y - 1};
    r.add_term(lowered, c * static_cast<double>(power));
  }
  return r;
}

namespace detail {
inline double ipow(double base, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= base;
  return r;
}
}  // namespace detail

// Sum of monomials in ascending exponent order.
inline double evaluate(const Polynomial2d& p, double x, double y) {
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) sum += c * detail::ipow(x, e.x) * detail::ipow(y, e.y);
  return sum;
}

// Re-expresses p in (u, v) = (x - x0, y - y0) by binomial expansion.
inline Polynomial2d taylor_shift(const Polynomial2d& p, double x0, double y0) {
  Polynomial2d r;
  for (const auto& [e, c] : p.terms()) {
    double binom_x = 1.0;
    for (int a = 0; a <= e.x; ++a) {
      const double cx = c * binom_x * detail::ipow(x0, e.x - a);
      double binom_y = 1.0;
      for (int b = 0; b <= e.y; ++b) {
        r.add_term({a, b}, cx * binom_y * detail::ipow(y0, e.y - b));
        binom_y = binom_y * (e.y - b) / (b + 1);
      }
      binom_x = binom_x * (e.x - a) / (a + 1);
    }
  }
  return r;
}

// Substitutes parameter values; coefficients that bind to zero are dropped.
template <typename Bindings>
Polynomial2d bind(const ParamPolynomial2& p, const Bindings& bindings) {
  Polynomial2d r;
  for (const auto& [e, c] : p.terms()) r.add_term(e, c.value(bindings));
  return r;
}

// Renders p in the grammar accepted by parse_poly, highest degree first.
std::string to_string(const Polynomial2d& p);

// Shortest decimal (no exponent) that reads back to the same double.
std::string format_decimal(double value);

}  // namespace whorl
