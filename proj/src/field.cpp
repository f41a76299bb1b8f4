#include "whorl/field.hpp"

#include <utility>

namespace whorl {

PlanarField::PlanarField(Polynomial2d p, Polynomial2d q, ParamBindings params)
    : p_(std::move(p)), q_(std::move(q)), params_(std::move(params)) {
  if (p_.is_zero() && q_.is_zero()) throw InvalidField("both field components are identically zero");
  dp_dx_ = differentiate(p_, Variable::x);
  dp_dy_ = differentiate(p_, Variable::y);
  dq_dx_ = differentiate(q_, Variable::x);
  dq_dy_ = differentiate(q_, Variable::y);
}

PlanarField field_from_text(const std::string& p_text, const std::string& q_text,
                            const ParamBindings& params) {
  return PlanarField(parse_bound(p_text, params), parse_bound(q_text, params), params);
}

PlanarField whorl_family(double theta) { return field_from_text("y", kWhorlQ, {{"theta", theta}}); }

}  // namespace whorl
