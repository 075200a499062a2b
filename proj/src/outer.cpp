#include "svrpl/outer.hpp"

#include "svrpl/prox.hpp"

#include <algorithm>
#include <cmath>

namespace svrpl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

OuterFunction::OuterFunction(Variant v) : v_(v) {
  std::visit(overloaded{
                 [](const SquaredNorm& s) {
                   if (!(s.coeff > 0.0) || !std::isfinite(s.coeff))
                     throw invalid_argument("SquaredNorm: coeff must be positive");
                 },
                 [](const TruncatedIdentity& t) {
                   if (!std::isfinite(t.floor))
                     throw invalid_argument("TruncatedIdentity: floor must be finite");
                 },
                 [](const AffinePlusHinge& a) {
                   if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
                     throw invalid_argument("AffinePlusHinge: weight must be nonnegative");
                 },
                 [](const auto&) {},
             },
             v_);
}

std::string OuterFunction::name() const {
  return std::visit(overloaded{
                        [](const L1Norm&) { return std::string("l1"); },
                        [](const SquaredNorm&) { return std::string("squared"); },
                        [](const MaxCoordinate&) { return std::string("max"); },
                        [](const EuclideanNorm&) { return std::string("l2"); },
                        [](const TruncatedIdentity&) { return std::string("truncated"); },
                        [](const AffinePlusHinge&) { return std::string("affine-hinge"); },
                    },
                    v_);
}

std::optional<Eigen::Index> OuterFunction::required_dim() const {
  if (is<TruncatedIdentity>()) return 1;
  if (is<AffinePlusHinge>()) return 2;
  return std::nullopt;
}

static void check_dim(const OuterFunction& f, const Vector& z) {
  if (auto need = f.required_dim(); need && z.size() != *need)
    throw dimension_error("outer function " + f.name() + " expects m = " +
                          std::to_string(*need) + ", got " + std::to_string(z.size()));
  if (z.size() == 0) throw dimension_error("outer function: empty argument");
}

double OuterFunction::value(const Vector& z) const {
  check_dim(*this, z);
  return std::visit(overloaded{
                        [&](const L1Norm&) { return z.lpNorm<1>(); },
                        [&](const SquaredNorm& s) { return s.coeff * z.squaredNorm(); },
                        [&](const MaxCoordinate&) { return z.maxCoeff(); },
                        [&](const EuclideanNorm&) { return z.norm(); },
                        [&](const TruncatedIdentity& t) { return std::max(z[0], t.floor); },
                        [&](const AffinePlusHinge& a) {
                          return z[0] + a.weight * std::max(0.0, z[1]);
                        },
                    },
                    v_);
}

std::optional<double> OuterFunction::lipschitz(Eigen::Index m) const {
  return std::visit(overloaded{
                        [&](const L1Norm&) -> std::optional<double> {
                          return std::sqrt(static_cast<double>(m));
                        },
                        [](const SquaredNorm&) -> std::optional<double> { return std::nullopt; },
                        [](const MaxCoordinate&) -> std::optional<double> { return 1.0; },
                        [](const EuclideanNorm&) -> std::optional<double> { return 1.0; },
                        [](const TruncatedIdentity&) -> std::optional<double> { return 1.0; },
                        [](const AffinePlusHinge& a) -> std::optional<double> {
                          return std::sqrt(1.0 + a.weight * a.weight);
                        },
                    },
                    v_);
}

double OuterFunction::conjugate_value(const Vector& y) const {
  if (auto s = std::get_if<SquaredNorm>(&v_)) return y.squaredNorm() / (4.0 * s->coeff);
  // max{z, c} = sup_{y in [0,1]} y z + (1 - y) c
  if (auto t = std::get_if<TruncatedIdentity>(&v_)) return -(1.0 - y[0]) * t->floor;
  return 0.0;
}

Vector OuterFunction::conjugate_gradient(const Vector& y) const {
  if (auto s = std::get_if<SquaredNorm>(&v_)) return y / (2.0 * s->coeff);
  if (auto t = std::get_if<TruncatedIdentity>(&v_)) return Vector::Constant(1, t->floor);
  return Vector::Zero(y.size());
}

double OuterFunction::conjugate_curvature() const {
  if (auto s = std::get_if<SquaredNorm>(&v_)) return 1.0 / (2.0 * s->coeff);
  return 0.0;
}

Vector OuterFunction::project_conjugate_domain(const Vector& y) const {
  check_dim(*this, y);
  return std::visit(overloaded{
                        [&](const L1Norm&) { return project_linf_ball(y, 1.0); },
                        [&](const SquaredNorm&) { return Vector(y); },
                        [&](const MaxCoordinate&) { return project_simplex(y); },
                        [&](const EuclideanNorm&) { return project_l2_ball(y, 1.0); },
                        [&](const TruncatedIdentity&) {
                          return Vector(Vector::Constant(1, std::clamp(y[0], 0.0, 1.0)));
                        },
                        [&](const AffinePlusHinge& a) {
                          Vector p(2);
                          p << 1.0, std::clamp(y[1], 0.0, a.weight);
                          return p;
                        },
                    },
                    v_);
}

}  // namespace svrpl
