#pragma once

#include "svrpl/types.hpp"

#include <string>
#include <type_traits>
#include <variant>

namespace svrpl {

struct ZeroReg {};
// h(x) = lambda ||x||_1
struct L1Reg {
  double lambda = 0.0;
};
// Indicator of {x : x_1..x_d in the unit simplex}; coordinates past d are free.
struct SimplexIndicator {
  Eigen::Index d = 0;
};

class Regularizer {
 public:
  using Variant = std::variant<ZeroReg, L1Reg, SimplexIndicator>;

  Regularizer(Variant v);  // NOLINT(google-explicit-constructor)
  template <typename T>
    requires std::is_constructible_v<Variant, T> && (!std::is_same_v<std::decay_t<T>, Variant>)
  Regularizer(T v) : Regularizer(Variant(std::move(v))) {}  // NOLINT

  const Variant& variant() const { return v_; }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <typename T>
  const T& as() const { return std::get<T>(v_); }

  std::string name() const;

  // +infinity outside dom h.
  double value(const Vector& x) const;
  bool in_domain(const Vector& x, double tol = 1e-9) const;

  // argmin_u { h(u) + ||u - v||^2 / (2t) }
  Vector prox(const Vector& v, double t) const;

 private:
  Variant v_;
};

}  // namespace svrpl
