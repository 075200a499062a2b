#pragma once

#include "svrpl/estimators.hpp"
#include "svrpl/metrics.hpp"
#include "svrpl/problem.hpp"
#include "svrpl/schedule.hpp"
#include "svrpl/subproblem.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace svrpl {

// Passed to the hook after every iteration, and once for the starting point
// (epoch 1, inner 0). `x` is the newest iterate.
struct IterationInfo {
  std::uint64_t epoch = 0;
  std::uint64_t inner = 0;
  std::uint64_t iteration = 0;  // global count of completed iterations
  std::uint64_t samples_g = 0;
  std::uint64_t samples_j = 0;
  const Vector* x = nullptr;
};

using IterationHook = std::function<void(const IterationInfo&)>;

struct RunOptions {
  double subproblem_tol = kDefaultSubproblemTol;
  int subproblem_iters = kDefaultSubproblemIters;
  // Exact metrics every `trace_stride` iterations plus the starting point;
  // 0 disables the built-in trace.
  std::uint64_t trace_stride = 0;
  // Metric M; the schedule's M when unset.
  std::optional<double> metric_M;
  // Wall time is off by default so traces are byte-reproducible.
  bool wall_clock = false;
  IterationHook hook;
};

struct RunResult {
  Vector output_x;  // the uniformly drawn iterate
  std::uint64_t output_epoch = 0;
  std::uint64_t output_inner = 0;
  Vector final_x;
  std::vector<TraceRecord> trace;
  std::uint64_t total_calls_g = 0;
  std::uint64_t total_calls_j = 0;
  std::uint64_t seed = 0;
};

// Epoch-based variance-reduced prox-linear method. Each epoch computes its
// anchor estimate at x_0, takes tau prox-linear steps and hands x_tau to the
// next epoch. The returned iterate is drawn uniformly from the grid of x^k_i,
// i < tau, using the first draws of the run's generator.
RunResult run_svr_pl(const CompositeProblem& problem, Scheme scheme, const Schedule& schedule,
                     const Vector& x0, std::uint64_t seed, const RunOptions& options = {});

// Fresh mini-batch estimates every iteration. The schedule must have K = 1;
// its anchor batch is used at iteration 0 and its inner batch afterwards.
RunResult run_minibatch_pl(const CompositeProblem& problem, const Schedule& schedule,
                           const Vector& x0, std::uint64_t seed, const RunOptions& options = {});

// T exact prox-linear steps. The output iterate is the last one.
RunResult run_deterministic_pl(const CompositeProblem& problem, double M, std::uint64_t T,
                               const Vector& x0, const RunOptions& options = {});

}  // namespace svrpl
