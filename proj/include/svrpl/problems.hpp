#pragma once

#include "svrpl/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace svrpl {

// Standard normal draw from the run generator (Box-Muller on uniform_unit),
// so generated data does not depend on the standard library's distributions.
double standard_normal(Rng& rng);

struct MultiLossInstance {
  Matrix features;  // N x n, row j is a_j
  Vector labels;    // N entries in {-1, +1}
  double beta = 0.0;

  void validate() const;
};

// Four-loss classification mapping: with z = b a^T x, component j maps x to
//   (1 - tanh z, (1 - sigmoid z)^2, log(1 + e^-z) - log(1 + e^{-z-1}), log(1 + (z - 1)^2)).
// The composite problem is ||(1/N) sum_j g_j(x)||_1 + beta ||x||_1.
//
// Each row is phi_r(z) with |phi_r'| and |phi_r''| bounded, so component j
// has ell_g = C1 ||a_j|| and L_g = C2 ||a_j||^2; the problem stores the
// root-mean-square over j, which bounds both the averaged mapping and the
// mean-square Lipschitz constants used by the variance bounds.
CompositeProblem multiloss_oracle(const MultiLossInstance& instance);

// Same mapping with Phi(x) = ||(1/N) sum_j g_j(x)||^2 and h = 0. The outer
// function is only locally Lipschitz: ell_f = 2 sup ||g|| on the ball of
// radius `radius`, recorded in constants().domain_radius.
CompositeProblem multiloss_smooth_oracle(const MultiLossInstance& instance, double radius = 10.0);

// Row-wise derivative bounds of the four losses.
inline constexpr double kMultilossSlopeBound[4] = {1.0, 8.0 / 27.0, 0.2449186624037093, 1.0};
inline constexpr double kMultilossCurvatureBound[4] = {0.7698003589195011, 0.155, 0.25, 2.0};

// Labeled Gaussian data: a_j ~ N(0, scale^2 I), labels from a random
// hyperplane with a fraction `flip` of labels flipped.
MultiLossInstance synthetic_multiloss(std::uint64_t N, Eigen::Index n, std::uint64_t seed,
                                      double scale = 1.0, double flip = 0.1, double beta = 0.0);

struct PortfolioInstance {
  Matrix returns;  // N x d, row i is r_i
  double beta = 0.1;   // CVaR level
  double rho = 1.0;    // penalty weight
  double gamma = 1e-3; // smoothing of the inner hinge

  void validate() const;
};

// Mean-return objective with an exact CVaR penalty. The variable is (x, tau)
// in R^{d+1}; component i maps it to
//   ( -r_i^T x,  tau + (sqrt(u^2 + gamma^2) - u - gamma) / (2 beta) ),  u = r_i^T x + tau,
// f(z) = z_1 + rho max{0, z_2}, and h restricts x to the simplex.
CompositeProblem portfolio_oracle(const PortfolioInstance& instance);

// Uniform weights and tau = 0.
Vector portfolio_start(const PortfolioInstance& instance);

// (sqrt(u^2 + gamma^2) - u - gamma) / (2 beta); tends to max{-u, 0} / beta as gamma -> 0.
double smoothed_hinge(double u, double beta, double gamma);

// Factor-model returns: r_i = mu + F f_i + e_i with a few common factors.
PortfolioInstance synthetic_portfolio(std::uint64_t N, Eigen::Index d, std::uint64_t seed,
                                      double beta = 0.1, double rho = 1.0, double gamma = 1e-3);

// Small problems with closed-form structure and exact constants.
struct SyntheticProblem {
  CompositeProblem problem;
  Vector x0;
  std::optional<Vector> stationary;  // known point with G_M = 0
};

// g_i(x) = A_i x - b_i, f = coeff ||.||^2, h = 0. The stationary point is the
// least-squares solution of (mean A) x = mean b.
SyntheticProblem linear_least_squares(std::uint64_t N, Eigen::Index m, Eigen::Index n,
                                      std::uint64_t seed, double coeff = 1.0);

// g_i(x) = x + c_i, f = ||.||_1, h = 0. G_M vanishes at -mean(c).
SyntheticProblem shifted_identity(std::uint64_t N, Eigen::Index n, std::uint64_t seed);

// g_i(x) = ||x - c_i||^2 / 2, f = max{., g*} with g* = min_x mean g_i(x).
// The minimizer is mean(c). ell_g holds on the ball of radius `radius`.
SyntheticProblem truncated_sg(std::uint64_t N, Eigen::Index n, std::uint64_t seed,
                              double radius = 5.0);

// g_i(x) = A_i x + (q_i / 2) ||x||^2 u_i + c_i with ||u_i|| = 1, f = ||.||_2.
// Component Jacobians are exactly |q_i|-Lipschitz; L_g is their RMS.
SyntheticProblem quadratic_bowl(std::uint64_t N, Eigen::Index m, Eigen::Index n,
                                std::uint64_t seed, double radius = 3.0);

// Every built-in problem at desk scale, for sweeping checks.
struct NamedProblem {
  std::string name;
  CompositeProblem problem;
  Vector x0;
};
std::vector<NamedProblem> builtin_problems(std::uint64_t seed = 7);

struct JacobianCheck {
  bool passed = true;
  double worst_rel_error = 0.0;
  int points = 0;
};

// Central differences with steps h and h/2, h = 1e-5 (1 + ||x||), combined by
// Richardson extrapolation, at `points` random x in the ball of radius
// `radius`, one random token each. The error is measured as
// ||J_fd - J||_F / max(1, ||J||_F).
JacobianCheck check_jacobian(const CompositeProblem& problem, std::uint64_t seed, int points = 20,
                             double radius = 1.0, double rel_tol = 1e-5);

struct LipschitzProbe {
  std::string name;   // ell_f, ell_g or L_g
  double documented = 0.0;
  double observed = 0.0;  // largest difference quotient seen
  bool passed() const { return observed <= documented * (1.0 + 1e-9) + 1e-12; }
};

// Largest empirical difference quotients of f, of the averaged g and of its
// Jacobian (spectral norm) over random pairs in the problem's ball (its
// domain_radius, else `radius`). Pairs are snapped onto dom h.
std::vector<LipschitzProbe> probe_lipschitz(const CompositeProblem& problem, std::uint64_t seed,
                                            int pairs = 10000, double radius = 1.0);

// Random point in the ball of the given radius, projected onto dom h.
Vector random_point(const CompositeProblem& problem, Rng& rng, double radius);

}  // namespace svrpl
