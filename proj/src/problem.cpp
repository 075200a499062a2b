#include "svrpl/problem.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace svrpl {

Expectation uniform_expectation(std::uint64_t n) {
  if (n == 0) throw invalid_argument("uniform_expectation: empty support");
  Expectation e;
  e.sampler = [n](Rng& rng) { return uniform_token(rng, n); };
  e.reference.resize(n);
  std::iota(e.reference.begin(), e.reference.end(), Token{1});
  return e;
}

std::optional<double> SmoothnessConstants::L_fog() const {
  if (!L_f) return std::nullopt;
  return ell_f * L_g + *L_f * ell_g * ell_g;
}

double SmoothnessConstants::default_M() const {
  const double m = 4.0 * ell_f * L_g;
  return m > 0.0 ? m : 1.0;
}

CompositeProblem::CompositeProblem(std::shared_ptr<const ComponentOracle> oracle,
                                   SamplingRegime regime, OuterFunction outer, Regularizer reg,
                                   SmoothnessConstants constants, std::string name)
    : oracle_(std::move(oracle)),
      regime_(std::move(regime)),
      outer_(std::move(outer)),
      reg_(std::move(reg)),
      constants_(constants),
      name_(std::move(name)) {
  if (!oracle_) throw invalid_argument("CompositeProblem: null oracle");
  if (oracle_->input_dim() < 1 || oracle_->output_dim() < 1)
    throw dimension_error("CompositeProblem: oracle dimensions must be positive");
  if (auto need = outer_.required_dim(); need && *need != oracle_->output_dim())
    throw dimension_error("CompositeProblem: outer function " + outer_.name() +
                          " needs m = " + std::to_string(*need) + ", oracle has m = " +
                          std::to_string(oracle_->output_dim()));
  if (auto s = std::get_if<SimplexIndicator>(&reg_.variant()); s && s->d > oracle_->input_dim())
    throw dimension_error("CompositeProblem: simplex block larger than n");
  if (auto fs = std::get_if<FiniteSum>(&regime_); fs && fs->n == 0)
    throw invalid_argument("CompositeProblem: finite sum needs N >= 1");
  if (auto ex = std::get_if<Expectation>(&regime_); ex && !ex->sampler)
    throw invalid_argument("CompositeProblem: expectation regime needs a sampler");
}

std::uint64_t CompositeProblem::num_components() const {
  if (auto fs = std::get_if<FiniteSum>(&regime_)) return fs->n;
  throw invalid_argument("num_components: expectation regime has no N");
}

std::vector<Token> CompositeProblem::reference_tokens() const {
  if (auto fs = std::get_if<FiniteSum>(&regime_)) {
    std::vector<Token> t(fs->n);
    std::iota(t.begin(), t.end(), Token{1});
    return t;
  }
  return std::get<Expectation>(regime_).reference;
}

CompositeProblem CompositeProblem::with_outer(OuterFunction outer) const {
  return {oracle_, regime_, std::move(outer), reg_, constants_, name_};
}
CompositeProblem CompositeProblem::with_reg(Regularizer reg) const {
  return {oracle_, regime_, outer_, std::move(reg), constants_, name_};
}
CompositeProblem CompositeProblem::with_constants(SmoothnessConstants constants) const {
  return {oracle_, regime_, outer_, reg_, constants, name_};
}
CompositeProblem CompositeProblem::with_regime(SamplingRegime regime) const {
  return {oracle_, std::move(regime), outer_, reg_, constants_, name_};
}
CompositeProblem CompositeProblem::with_oracle(std::shared_ptr<const ComponentOracle> oracle) const {
  return {std::move(oracle), regime_, outer_, reg_, constants_, name_};
}

void check_input(const CompositeProblem& problem, const Vector& x, const char* where) {
  if (x.size() != problem.n())
    throw dimension_error(std::string(where) + ": expected x of length " +
                          std::to_string(problem.n()) + ", got " + std::to_string(x.size()));
  if (!x.allFinite()) throw invalid_argument(std::string(where) + ": non-finite x");
}

Vector average_map(const ComponentOracle& oracle, std::span<const Token> tokens,
                   const Vector& x) {
  if (tokens.empty()) throw invalid_argument("average_map: empty token list");
  Vector sum = Vector::Zero(oracle.output_dim());
  for (Token t : tokens) sum += oracle.map(t, x);
  return sum / static_cast<double>(tokens.size());
}

Matrix average_jacobian(const ComponentOracle& oracle, std::span<const Token> tokens,
                        const Vector& x) {
  if (tokens.empty()) throw invalid_argument("average_jacobian: empty token list");
  Matrix sum = Matrix::Zero(oracle.output_dim(), oracle.input_dim());
  for (Token t : tokens) sum += oracle.jacobian(t, x);
  return sum / static_cast<double>(tokens.size());
}

static std::vector<Token> ground_truth_tokens(const CompositeProblem& problem, const char* where) {
  auto tokens = problem.reference_tokens();
  if (tokens.empty())
    throw invalid_argument(std::string(where) +
                           ": expectation regime without reference set needs explicit tokens");
  return tokens;
}

Vector full_average_map(const CompositeProblem& problem, const Vector& x) {
  check_input(problem, x, "full_average_map");
  const auto tokens = ground_truth_tokens(problem, "full_average_map");
  return average_map(problem.oracle(), tokens, x);
}

Vector full_average_map(const CompositeProblem& problem, const Vector& x,
                        std::span<const Token> tokens) {
  check_input(problem, x, "full_average_map");
  return average_map(problem.oracle(), tokens, x);
}

Matrix full_average_jacobian(const CompositeProblem& problem, const Vector& x) {
  check_input(problem, x, "full_average_jacobian");
  const auto tokens = ground_truth_tokens(problem, "full_average_jacobian");
  return average_jacobian(problem.oracle(), tokens, x);
}

Matrix full_average_jacobian(const CompositeProblem& problem, const Vector& x,
                             std::span<const Token> tokens) {
  check_input(problem, x, "full_average_jacobian");
  return average_jacobian(problem.oracle(), tokens, x);
}

double objective_value(const CompositeProblem& problem, const Vector& x) {
  check_input(problem, x, "objective_value");
  const double h = problem.reg().value(x);
  if (!std::isfinite(h)) return std::numeric_limits<double>::infinity();
  return problem.outer().value(full_average_map(problem, x)) + h;
}

}  // namespace svrpl
