#include "svrpl/regularizer.hpp"

#include "svrpl/prox.hpp"

#include <cmath>
#include <limits>

namespace svrpl {

Regularizer::Regularizer(Variant v) : v_(v) {
  if (auto l1 = std::get_if<L1Reg>(&v_); l1 && (!(l1->lambda >= 0.0) || !std::isfinite(l1->lambda)))
    throw invalid_argument("L1Reg: lambda must be nonnegative");
  if (auto s = std::get_if<SimplexIndicator>(&v_); s && s->d < 1)
    throw invalid_argument("SimplexIndicator: d must be at least 1");
}

std::string Regularizer::name() const {
  if (is<ZeroReg>()) return "zero";
  if (is<L1Reg>()) return "l1";
  return "simplex";
}

static Eigen::Index simplex_dim(const SimplexIndicator& s, const Vector& x) {
  if (x.size() < s.d)
    throw dimension_error("SimplexIndicator: vector shorter than simplex block");
  return s.d;
}

double Regularizer::value(const Vector& x) const {
  if (auto l1 = std::get_if<L1Reg>(&v_)) return l1->lambda * x.lpNorm<1>();
  if (std::holds_alternative<SimplexIndicator>(v_)) {
    return in_domain(x) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

bool Regularizer::in_domain(const Vector& x, double tol) const {
  auto s = std::get_if<SimplexIndicator>(&v_);
  if (!s) return true;
  const auto d = simplex_dim(*s, x);
  const auto head = x.head(d);
  return head.minCoeff() >= -tol && std::abs(head.sum() - 1.0) <= tol;
}

Vector Regularizer::prox(const Vector& v, double t) const {
  if (!(t > 0.0)) throw invalid_argument("prox: step must be positive");
  if (auto l1 = std::get_if<L1Reg>(&v_)) return prox_l1(v, t, l1->lambda);
  if (auto s = std::get_if<SimplexIndicator>(&v_)) {
    const auto d = simplex_dim(*s, v);
    Vector out = v;
    out.head(d) = project_simplex(v.head(d));
    return out;
  }
  return v;
}

}  // namespace svrpl
