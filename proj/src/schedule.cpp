#include "svrpl/schedule.hpp"

#include <cfloat>
#include <cmath>
#include <string>

namespace svrpl {

std::uint64_t Schedule::total_iterations() const {
  std::uint64_t total = 0;
  for (const auto& e : epochs) total += e.tau;
  return total;
}

std::uint64_t Schedule::implied_calls_g() const {
  std::uint64_t total = 0;
  for (const auto& e : epochs) total += e.anchor.size_g + (e.tau - 1) * e.inner.size_g;
  return total;
}

std::uint64_t Schedule::implied_calls_j() const {
  std::uint64_t total = 0;
  for (const auto& e : epochs) total += e.anchor.size_j + (e.tau - 1) * e.inner.size_j;
  return total;
}

void Schedule::validate() const {
  if (epochs.empty()) throw invalid_argument("schedule: K must be at least 1");
  if (!(M > 0.0) || !std::isfinite(M)) throw invalid_argument("schedule: M must be positive");
  for (std::size_t k = 0; k < epochs.size(); ++k) {
    const auto& e = epochs[k];
    if (e.tau < 1) throw invalid_argument("schedule: epoch " + std::to_string(k + 1) + " has tau = 0");
    e.anchor.validate();
    e.inner.validate();
  }
}

void Schedule::validate(const CompositeProblem& problem) const {
  validate();
  if (!problem.is_finite_sum()) return;
  const auto n = problem.num_components();
  for (std::size_t k = 0; k < epochs.size(); ++k) {
    const auto& e = epochs[k];
    const bool uses_inner = e.tau > 1;
    if (e.anchor.size_g > n || e.anchor.size_j > n ||
        (uses_inner && (e.inner.size_g > n || e.inner.size_j > n)))
      throw invalid_argument("schedule: epoch " + std::to_string(k + 1) +
                             " has a batch larger than N = " + std::to_string(n));
  }
}

std::uint64_t snap_ceil(double v) {
  if (!std::isfinite(v)) throw invalid_argument("schedule: non-finite size");
  if (v <= 0.0) return 0;
  const double r = std::round(v);
  if (std::abs(v - r) <= 64.0 * DBL_EPSILON * std::max(1.0, std::abs(v)))
    return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(v));
}

std::uint64_t batch_size(double v) { return std::max<std::uint64_t>(1, snap_ceil(v)); }

namespace {

void check_eps(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw invalid_argument("schedule: epsilon must be positive");
}

void check_M(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) throw invalid_argument("schedule: M must be positive");
}

double need(const std::optional<double>& v, const char* name, const char* who) {
  if (!v) throw invalid_argument(std::string(who) + ": constant " + name + " is required");
  return *v;
}

double need_positive(double v, const char* name, const char* who) {
  if (!(v > 0.0)) throw invalid_argument(std::string(who) + ": constant " + name + " must be positive");
  return v;
}

std::uint64_t epoch_count(const EpochRule& rule, double numerator) {
  if (rule.objective_gap) {
    if (*rule.objective_gap < 0.0) throw invalid_argument("schedule: objective gap must be nonnegative");
    return batch_size(numerator * *rule.objective_gap);
  }
  if (rule.epochs < 1) throw invalid_argument("schedule: K must be at least 1");
  return rule.epochs;
}

Schedule repeat(const EpochPlan& plan, std::uint64_t K, double M, double epsilon) {
  Schedule s;
  s.epochs.assign(K, plan);
  s.M = M;
  s.epsilon = epsilon;
  s.validate();
  return s;
}

}  // namespace

Schedule schedule_svrg_finite(std::uint64_t N, double epsilon, double M, EpochRule rule) {
  check_eps(epsilon);
  check_M(M);
  if (N < 1) throw invalid_argument("schedule_svrg_finite: N must be positive");
  const double n = static_cast<double>(N);
  EpochPlan plan;
  plan.tau = batch_size(0.5 * std::pow(n, 0.2) - 1.0);
  plan.anchor = {N, N, false};
  plan.inner = {batch_size(4.0 * std::pow(n, 0.8)), batch_size(std::pow(n, 0.4)), true};
  const auto K = epoch_count(rule, 15.0 * M / (epsilon * static_cast<double>(plan.tau)));
  return repeat(plan, K, M, epsilon);
}

Schedule schedule_minibatch(const SmoothnessConstants& c, double epsilon, double M, EpochRule rule) {
  check_eps(epsilon);
  check_M(M);
  const char* who = "schedule_minibatch";
  const double sg = need(c.sigma_g, "sigma_g", who);
  const double sj = need(c.sigma_gprime, "sigma_gprime", who);
  const double Lg = need_positive(c.L_g, "L_g", who);
  EpochPlan plan;
  plan.anchor.size_g = batch_size(36.0 * c.ell_f * c.ell_f * sg * sg / (epsilon * epsilon));
  plan.anchor.size_j = batch_size(2.0 * c.ell_f * sj * sj / (Lg * epsilon));
  plan.inner = plan.anchor;
  if (rule.objective_gap) {
    if (*rule.objective_gap < 0.0) throw invalid_argument("schedule: objective gap must be nonnegative");
    plan.tau = batch_size(12.0 * M * *rule.objective_gap / epsilon);
  } else {
    if (rule.epochs < 1) throw invalid_argument("schedule: T must be at least 1");
    plan.tau = rule.epochs;
  }
  return repeat(plan, 1, M, epsilon);
}

Schedule schedule_sarah_expect_nonsmooth(const SmoothnessConstants& c, double epsilon, double M,
                                         EpochRule rule) {
  check_eps(epsilon);
  check_M(M);
  const char* who = "schedule_sarah_expect_nonsmooth";
  const double sg = need(c.sigma_g, "sigma_g", who);
  const double sj = need(c.sigma_gprime, "sigma_gprime", who);
  const double Lg = need_positive(c.L_g, "L_g", who);
  const double lf = c.ell_f;
  EpochPlan plan;
  plan.tau = batch_size(1.0 / std::sqrt(epsilon));
  plan.anchor.size_g = batch_size(25.0 * lf * lf * sg * sg / (4.0 * epsilon * epsilon));
  plan.anchor.size_j = batch_size(3.0 * lf * sj * sj / (4.0 * Lg * M * epsilon));
  plan.inner.size_g = batch_size(25.0 * lf * lf * c.ell_g * c.ell_g / (M * std::pow(epsilon, 1.5)));
  plan.inner.size_j = batch_size(12.0 * lf * Lg / (M * std::sqrt(epsilon)));
  const auto K = epoch_count(rule, 24.0 * M / (epsilon * static_cast<double>(plan.tau)));
  return repeat(plan, K, M, epsilon);
}

Schedule schedule_sarah_finite_smooth(std::uint64_t N, double epsilon, double M, EpochRule rule) {
  check_eps(epsilon);
  check_M(M);
  if (N < 1) throw invalid_argument("schedule_sarah_finite_smooth: N must be positive");
  const auto root = batch_size(std::sqrt(static_cast<double>(N)));
  EpochPlan plan;
  plan.tau = root;
  plan.anchor = {N, N, false};
  plan.inner = {2 * root, 2 * root, false};
  const auto K = epoch_count(rule, 24.0 * M / (epsilon * static_cast<double>(plan.tau)));
  return repeat(plan, K, M, epsilon);
}

namespace {

EpochPlan smooth_expect_plan(const SmoothnessConstants& c, double epsilon, const char* who) {
  const double sg = need(c.sigma_g, "sigma_g", who);
  const double sj = need(c.sigma_gprime, "sigma_gprime", who);
  const double Lf = need(c.L_f, "L_f", who);
  const double Lg = need_positive(c.L_g, "L_g", who);
  const auto root = batch_size(1.0 / std::sqrt(epsilon));
  EpochPlan plan;
  plan.tau = root;
  plan.anchor.size_g = batch_size(11.0 * Lf * sg * sg / (4.0 * epsilon));
  plan.anchor.size_j = batch_size(3.0 * c.ell_f * c.ell_f * sj * sj / (2.0 * Lg * epsilon));
  plan.inner = {2 * root, 2 * root, false};
  return plan;
}

}  // namespace

Schedule schedule_sarah_expect_smooth(const SmoothnessConstants& c, double epsilon, double M,
                                      EpochRule rule) {
  check_eps(epsilon);
  check_M(M);
  const auto plan = smooth_expect_plan(c, epsilon, "schedule_sarah_expect_smooth");
  const auto K = epoch_count(rule, 24.0 * M / (epsilon * static_cast<double>(plan.tau)));
  return repeat(plan, K, M, epsilon);
}

Schedule schedule_adaptive(const SmoothnessConstants& c, std::uint64_t K, double M) {
  check_M(M);
  if (K < 1) throw invalid_argument("schedule_adaptive: K must be at least 1");
  Schedule s;
  s.M = M;
  for (std::uint64_t k = 1; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    auto plan = smooth_expect_plan(c, 1.0 / (kk * kk), "schedule_adaptive");
    s.epochs.push_back(plan);
  }
  s.validate();
  return s;
}

}  // namespace svrpl
