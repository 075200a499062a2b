#pragma once

#include "svrpl/problem.hpp"
#include "svrpl/subproblem.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace svrpl {

struct TraceRecord {
  std::uint64_t samples_g = 0;
  std::uint64_t samples_j = 0;
  std::uint64_t epoch = 0;
  std::uint64_t inner = 0;
  double objective = 0.0;
  double grad_map_sq = 0.0;
  std::int64_t wall_ms = 0;

  bool operator==(const TraceRecord&) const = default;
};

// G_M(x) = M (x - x+), where x+ is the prox-linear step built from the exact
// g(x) and g'(x). Expectation problems use their reference token set.
Vector exact_gradient_mapping(const CompositeProblem& problem, const Vector& x, double M,
                              double tol = kDefaultSubproblemTol,
                              int max_iters = kDefaultSubproblemIters);

// M (x - x_next), the mapping the algorithm actually observes.
Vector approx_gradient_mapping(const Vector& x, const Vector& x_next, double M);

inline constexpr const char* kTraceHeader =
    "samples_g,samples_j,epoch,inner,objective,grad_map_sq,wall_ms";

// CSV with a header row, 17 significant digits, LF line endings.
void emit_trace(std::span<const TraceRecord> records, std::ostream& out);
void emit_trace(std::span<const TraceRecord> records, const std::filesystem::path& path);

std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

// Shortest round-trippable text for a double ("%.17g").
std::string format_real(double v);

// Smallest objective across traces; stands in for Phi* in gap plots.
double min_objective(std::span<const std::vector<TraceRecord>> traces);

// Elementwise mean of equally shaped traces, e.g. over seeds. Integer
// columns are averaged and rounded down; indices are taken from the first.
std::vector<TraceRecord> mean_trace(std::span<const std::vector<TraceRecord>> traces);

}  // namespace svrpl
