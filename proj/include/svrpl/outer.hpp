#pragma once

#include "svrpl/types.hpp"

#include <optional>
#include <string>
#include <type_traits>
#include <variant>

namespace svrpl {

// f(z) = ||z||_1
struct L1Norm {};
// f(z) = coeff * ||z||^2
struct SquaredNorm {
  double coeff = 1.0;
};
// f(z) = max_j z_j
struct MaxCoordinate {};
// f(z) = ||z||_2
struct EuclideanNorm {};
// f(z) = max{z, floor}, m = 1
struct TruncatedIdentity {
  double floor = 0.0;
};
// f(z) = z_1 + weight * max{0, z_2}, m = 2
struct AffinePlusHinge {
  double weight = 1.0;
};

/// Convex outer function of the composite objective f(g(x)) + h(x).
///
/// Every variant exposes its Fenchel conjugate in the form
///   f*(y) = offset + <linear, y> + (curvature / 2) ||y||^2,   y in dom f*,
/// together with the Euclidean projection onto dom f*. The dual subproblem
/// solver is written against this interface only.
class OuterFunction {
 public:
  using Variant = std::variant<L1Norm, SquaredNorm, MaxCoordinate, EuclideanNorm,
                               TruncatedIdentity, AffinePlusHinge>;

  OuterFunction(Variant v);  // NOLINT(google-explicit-constructor)
  template <typename T>
    requires std::is_constructible_v<Variant, T> && (!std::is_same_v<std::decay_t<T>, Variant>)
  OuterFunction(T v) : OuterFunction(Variant(std::move(v))) {}  // NOLINT

  const Variant& variant() const { return v_; }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <typename T>
  const T& as() const { return std::get<T>(v_); }

  std::string name() const;

  double value(const Vector& z) const;

  // Output dimension the variant requires, if fixed.
  std::optional<Eigen::Index> required_dim() const;

  // Global Lipschitz constant for the Lipschitz variants; empty for
  // SquaredNorm, which is only locally Lipschitz.
  std::optional<double> lipschitz(Eigen::Index m) const;

  bool is_smooth() const { return is<SquaredNorm>(); }

  // Conjugate pieces. `conjugate_value` assumes y already lies in dom f*.
  double conjugate_value(const Vector& y) const;
  Vector conjugate_gradient(const Vector& y) const;
  double conjugate_curvature() const;
  Vector project_conjugate_domain(const Vector& y) const;

 private:
  Variant v_;
};

}  // namespace svrpl
