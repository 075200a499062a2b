#include "svrpl/driver.hpp"

#include <chrono>
#include <string>

namespace svrpl {

namespace {

struct GridCell {
  std::uint64_t epoch;
  std::uint64_t inner;
};

GridCell draw_output_cell(const Schedule& schedule, Rng& rng) {
  const auto flat = uniform_token(rng, schedule.total_iterations()) - 1;
  std::uint64_t seen = 0;
  for (std::size_t k = 0; k < schedule.epochs.size(); ++k) {
    const auto tau = schedule.epochs[k].tau;
    if (flat < seen + tau) return {k + 1, flat - seen};
    seen += tau;
  }
  return {schedule.epochs.size(), schedule.epochs.back().tau - 1};
}

class Tracer {
 public:
  Tracer(const CompositeProblem& problem, const Schedule& schedule, const RunOptions& options)
      : problem_(problem),
        options_(options),
        M_(options.metric_M.value_or(schedule.M)),
        start_(std::chrono::steady_clock::now()) {}

  void record(const IterationInfo& info, std::vector<TraceRecord>& trace) {
    if (options_.trace_stride == 0) return;
    if (info.iteration % options_.trace_stride != 0) return;
    TraceRecord r;
    r.samples_g = info.samples_g;
    r.samples_j = info.samples_j;
    r.epoch = info.epoch;
    r.inner = info.inner;
    r.objective = objective_value(problem_, *info.x);
    r.grad_map_sq = exact_gradient_mapping(problem_, *info.x, M_, options_.subproblem_tol,
                                           options_.subproblem_iters)
                        .squaredNorm();
    if (options_.wall_clock) {
      r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
    }
    trace.push_back(r);
  }

 private:
  const CompositeProblem& problem_;
  const RunOptions& options_;
  double M_;
  std::chrono::steady_clock::time_point start_;
};

RunResult run_epochs(const CompositeProblem& problem, Scheme scheme, const Schedule& schedule,
                     const Vector& x0, std::uint64_t seed, const RunOptions& options,
                     bool last_iterate_output) {
  schedule.validate(problem);
  check_input(problem, x0, "run");
  if (!problem.reg().in_domain(x0)) throw invalid_argument("run: x0 outside dom h");

  Rng rng(seed);
  const GridCell cell = last_iterate_output ? GridCell{0, 0} : draw_output_cell(schedule, rng);
  Estimator estimator(scheme, problem, std::move(rng));

  RunResult result;
  result.seed = seed;
  Tracer tracer(problem, schedule, options);
  Vector x = x0;

  auto notify = [&](std::uint64_t epoch, std::uint64_t inner, std::uint64_t iteration) {
    IterationInfo info{epoch, inner, iteration, result.total_calls_g, result.total_calls_j, &x};
    tracer.record(info, result.trace);
    if (options.hook) options.hook(info);
  };

  ProxLinearModel model;
  model.M = schedule.M;
  model.outer = problem.outer();
  model.reg = problem.reg();

  std::uint64_t iteration = 0;
  notify(1, 0, 0);
  for (std::size_t k = 0; k < schedule.epochs.size(); ++k) {
    const auto& plan = schedule.epochs[k];
    const std::uint64_t epoch = k + 1;
    for (std::uint64_t i = 0; i < plan.tau; ++i) {
      if (epoch == cell.epoch && i == cell.inner) {
        result.output_x = x;
        result.output_epoch = epoch;
        result.output_inner = i;
      }
      EstimateOut est = i == 0 ? estimator.anchor_reset(x, plan.anchor)
                               : estimator.inner_update(x, plan.inner);
      result.total_calls_g += est.calls_g;
      result.total_calls_j += est.calls_j;

      model.x_bar = x;
      model.g_tilde = std::move(est.g_tilde);
      model.J_tilde = std::move(est.J_tilde);
      try {
        x = solve(model, options.subproblem_tol, options.subproblem_iters).x_plus;
      } catch (const SubproblemError& e) {
        throw SubproblemError("epoch " + std::to_string(epoch) + ", inner " + std::to_string(i) +
                                  ": " + e.what(),
                              e.best_x, e.best_y, e.gap, e.iters);
      }
      if (!x.allFinite())
        throw Error(ErrorKind::Numerical, "epoch " + std::to_string(epoch) + ", inner " +
                                              std::to_string(i) + ": iterate is not finite");
      notify(epoch, i + 1, ++iteration);
    }
  }

  result.final_x = x;
  if (last_iterate_output) {
    result.output_x = x;
    result.output_epoch = schedule.epochs.size();
    result.output_inner = schedule.epochs.back().tau;
  }
  return result;
}

}  // namespace

RunResult run_svr_pl(const CompositeProblem& problem, Scheme scheme, const Schedule& schedule,
                     const Vector& x0, std::uint64_t seed, const RunOptions& options) {
  if (scheme != Scheme::SvrgCorrected && scheme != Scheme::Sarah)
    throw invalid_argument("run_svr_pl: scheme must be svrg-corrected or sarah");
  return run_epochs(problem, scheme, schedule, x0, seed, options, false);
}

RunResult run_minibatch_pl(const CompositeProblem& problem, const Schedule& schedule,
                           const Vector& x0, std::uint64_t seed, const RunOptions& options) {
  if (schedule.K() != 1) throw invalid_argument("run_minibatch_pl: schedule must have K = 1");
  return run_epochs(problem, Scheme::MiniBatch, schedule, x0, seed, options, false);
}

RunResult run_deterministic_pl(const CompositeProblem& problem, double M, std::uint64_t T,
                               const Vector& x0, const RunOptions& options) {
  if (T < 1) throw invalid_argument("run_deterministic_pl: T must be at least 1");
  const auto n = problem.reference_tokens().size();
  Schedule s;
  s.M = M;
  s.epochs.push_back(EpochPlan{T, {n, n, false}, {n, n, false}});
  return run_epochs(problem, Scheme::FullBatch, s, x0, 0, options, true);
}

}  // namespace svrpl
