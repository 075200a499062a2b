#pragma once

#include "svrpl/outer.hpp"
#include "svrpl/regularizer.hpp"
#include "svrpl/types.hpp"

namespace svrpl {

/// The convex model minimized by one prox-linear step:
///   x -> f(g_tilde + J_tilde (x - x_bar)) + h(x) + (M/2) ||x - x_bar||^2.
struct ProxLinearModel {
  Vector x_bar;
  Vector g_tilde;
  Matrix J_tilde;
  double M = 1.0;
  OuterFunction outer = L1Norm{};
  Regularizer reg = ZeroReg{};

  double value(const Vector& x) const;
  void validate() const;
};

enum class SolvePath { GaussNewton, Truncated, Dual };

struct SubproblemSolution {
  Vector x_plus;
  Vector dual_y;  // empty for the closed-form paths
  double gap = 0.0;
  int iters = 0;
  SolvePath path = SolvePath::Dual;
  // Truncated path only: J_tilde = 0 while g_tilde is above the floor.
  bool degenerate_jacobian = false;
};

// Raised when the dual solver runs out of iterations; carries the best pair.
class SubproblemError : public Error {
 public:
  SubproblemError(const std::string& what, Vector best_x, Vector best_y, double gap, int iters)
      : Error(ErrorKind::Numerical, what),
        best_x(std::move(best_x)),
        best_y(std::move(best_y)),
        gap(gap),
        iters(iters) {}

  Vector best_x;
  Vector best_y;
  double gap;
  int iters;
};

inline constexpr double kDefaultSubproblemTol = 1e-9;
inline constexpr int kDefaultSubproblemIters = 100000;

// Dispatches to the closed forms when they apply (SquaredNorm or
// TruncatedIdentity with h = 0), otherwise to the dual solver.
SubproblemSolution solve(const ProxLinearModel& model, double tol = kDefaultSubproblemTol,
                         int max_iters = kDefaultSubproblemIters);

// Damped Gauss-Newton step for f = c||.||^2, h = 0:
//   (M I + 2c J^T J) d = -2c J^T g_tilde,
// solved in whichever of the n x n or m x m forms is smaller.
SubproblemSolution solve_gauss_newton(const ProxLinearModel& model);

// Truncated model with f(z) = max{z, g*}, h = 0, m = 1:
//   x+ = x_bar - min{1/M, (g_tilde - g*) / ||J||^2} J^T, step clamped at 0.
SubproblemSolution solve_truncated(const ProxLinearModel& model);

// Projected gradient ascent on the Fenchel dual
//   D(y) = <y, g> - f*(y) + min_d { <J^T y, d> + h(x_bar + d) + (M/2)||d||^2 }
// with step 1 / (||J||^2 / M + curvature of f*). Primal recovery is
// x(y) = prox_{h/M}(x_bar - J^T y / M). Returns once the primal-dual gap of
// the best pair seen is at most tol.
SubproblemSolution solve_dual(const ProxLinearModel& model, double tol = kDefaultSubproblemTol,
                              int max_iters = kDefaultSubproblemIters);

}  // namespace svrpl
