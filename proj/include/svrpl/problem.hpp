#pragma once

#include "svrpl/outer.hpp"
#include "svrpl/regularizer.hpp"
#include "svrpl/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace svrpl {

/// Family of smooth component mappings g_t : R^n -> R^m with Jacobians.
/// Implementations must be pure functions of (token, x).
class ComponentOracle {
 public:
  virtual ~ComponentOracle() = default;
  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index output_dim() const = 0;
  virtual Vector map(Token t, const Vector& x) const = 0;
  virtual Matrix jacobian(Token t, const Vector& x) const = 0;
};

// Oracle assembled from callables; handy for toys and test fixtures.
class FunctionOracle final : public ComponentOracle {
 public:
  using MapFn = std::function<Vector(Token, const Vector&)>;
  using JacFn = std::function<Matrix(Token, const Vector&)>;

  FunctionOracle(Eigen::Index n, Eigen::Index m, MapFn map, JacFn jac)
      : n_(n), m_(m), map_(std::move(map)), jac_(std::move(jac)) {}

  Eigen::Index input_dim() const override { return n_; }
  Eigen::Index output_dim() const override { return m_; }
  Vector map(Token t, const Vector& x) const override { return map_(t, x); }
  Matrix jacobian(Token t, const Vector& x) const override { return jac_(t, x); }

 private:
  Eigen::Index n_, m_;
  MapFn map_;
  JacFn jac_;
};

struct FiniteSum {
  std::uint64_t n = 0;
};

struct Expectation {
  // Draws one token; must be a deterministic function of the generator state.
  std::function<Token(Rng&)> sampler;
  // Finite stand-in for the distribution, used as ground truth by the
  // offline metrics. May be empty when no such set exists.
  std::vector<Token> reference;
};

using SamplingRegime = std::variant<FiniteSum, Expectation>;

// Expectation regime drawing uniformly (with replacement) from tokens 1..n,
// with the full set as reference.
Expectation uniform_expectation(std::uint64_t n);

struct SmoothnessConstants {
  double ell_f = 0.0;  // Lipschitz constant of f (local when f is SquaredNorm)
  double ell_g = 0.0;  // Lipschitz constant of g
  double L_g = 0.0;    // Lipschitz constant of the Jacobian g'
  std::optional<double> L_f;  // gradient Lipschitz constant of f (smooth f only)
  std::optional<double> sigma_g;
  std::optional<double> sigma_gprime;
  // When set, the constants above are only claimed on the ball ||x|| <= radius.
  std::optional<double> domain_radius;

  // ell_f * L_g + L_f * ell_g^2, when L_f is present.
  std::optional<double> L_fog() const;

  // 4 ell_f L_g when positive. Affine mappings (L_g = 0) are majorized by
  // their own linearization for any M > 0, and default to M = 1.
  double default_M() const;
};

/// f(g(x)) + h(x) with g an average or expectation of oracle components.
class CompositeProblem {
 public:
  CompositeProblem(std::shared_ptr<const ComponentOracle> oracle, SamplingRegime regime,
                   OuterFunction outer, Regularizer reg, SmoothnessConstants constants,
                   std::string name = "problem");

  const ComponentOracle& oracle() const { return *oracle_; }
  std::shared_ptr<const ComponentOracle> oracle_ptr() const { return oracle_; }
  const SamplingRegime& regime() const { return regime_; }
  const OuterFunction& outer() const { return outer_; }
  const Regularizer& reg() const { return reg_; }
  const SmoothnessConstants& constants() const { return constants_; }
  const std::string& name() const { return name_; }

  Eigen::Index n() const { return oracle_->input_dim(); }
  Eigen::Index m() const { return oracle_->output_dim(); }

  bool is_finite_sum() const { return std::holds_alternative<FiniteSum>(regime_); }
  // N for finite sums; throws for expectation regimes.
  std::uint64_t num_components() const;

  // 1..N for finite sums; the reference set for expectation regimes.
  std::vector<Token> reference_tokens() const;

  // Same problem with a different outer function, regularizer or constants.
  CompositeProblem with_outer(OuterFunction outer) const;
  CompositeProblem with_reg(Regularizer reg) const;
  CompositeProblem with_constants(SmoothnessConstants constants) const;
  CompositeProblem with_regime(SamplingRegime regime) const;
  CompositeProblem with_oracle(std::shared_ptr<const ComponentOracle> oracle) const;

 private:
  std::shared_ptr<const ComponentOracle> oracle_;
  SamplingRegime regime_;
  OuterFunction outer_;
  Regularizer reg_;
  SmoothnessConstants constants_;
  std::string name_;
};

// Averages over the given tokens, summed in the order given.
Vector average_map(const ComponentOracle& oracle, std::span<const Token> tokens,
                   const Vector& x);
Matrix average_jacobian(const ComponentOracle& oracle, std::span<const Token> tokens,
                        const Vector& x);

// (1/N) sum_i g_i(x) in ascending token order. Expectation regimes average
// over their reference set, or over `tokens` when supplied.
Vector full_average_map(const CompositeProblem& problem, const Vector& x);
Vector full_average_map(const CompositeProblem& problem, const Vector& x,
                        std::span<const Token> tokens);
Matrix full_average_jacobian(const CompositeProblem& problem, const Vector& x);
Matrix full_average_jacobian(const CompositeProblem& problem, const Vector& x,
                             std::span<const Token> tokens);

// f(g(x)) + h(x); +infinity outside dom h.
double objective_value(const CompositeProblem& problem, const Vector& x);

void check_input(const CompositeProblem& problem, const Vector& x, const char* where);

}  // namespace svrpl
