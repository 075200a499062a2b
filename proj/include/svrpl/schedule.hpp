#pragma once

#include "svrpl/estimators.hpp"
#include "svrpl/problem.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace svrpl {

struct EpochPlan {
  std::uint64_t tau = 1;
  BatchSpec anchor;  // used at inner index 0
  BatchSpec inner;   // used at inner indices 1..tau-1
};

/// Epoch-by-epoch plan for one run. Fixed schedules repeat one EpochPlan K
/// times; the adaptive schedule grows tau and the batches with the epoch.
struct Schedule {
  std::vector<EpochPlan> epochs;
  double M = 1.0;
  std::optional<double> epsilon;

  std::size_t K() const { return epochs.size(); }
  std::uint64_t total_iterations() const;
  // Oracle calls the schedule implies: one anchor per epoch plus tau - 1
  // inner batches.
  std::uint64_t implied_calls_g() const;
  std::uint64_t implied_calls_j() const;

  void validate() const;
  // Also checks finite-sum batch sizes against N.
  void validate(const CompositeProblem& problem) const;
};

// How the number of epochs is fixed. With an estimate of Phi(x0) - Phi*
// K follows from the complexity bound; otherwise `epochs` is taken as given.
struct EpochRule {
  std::optional<double> objective_gap;
  std::uint64_t epochs = 1;
};

// Ceiling that forgives floating-point noise: values within a few ulps of
// an integer are that integer, so pow(1e5, 0.2) rounds to 10 and not 11.
std::uint64_t snap_ceil(double v);

// Same as snap_ceil, clamped below at 1.
std::uint64_t batch_size(double v);

// SVRG-corrected estimator, finite sum, nonsmooth f.
//   tau = ceil(N^{1/5}/2 - 1), B = ceil(4 N^{4/5}), S = ceil(N^{2/5}),
//   full anchors, shared inner batches, K = ceil(15 M gap / (eps tau)).
Schedule schedule_svrg_finite(std::uint64_t N, double epsilon, double M, EpochRule rule = {});

// Plain mini-batch method, K = 1 and T = ceil(12 M gap / eps) iterations.
//   B = ceil(36 ell_f^2 sigma_g^2 / eps^2), S = ceil(2 ell_f sigma_g'^2 / (L_g eps)).
Schedule schedule_minibatch(const SmoothnessConstants& c, double epsilon, double M,
                            EpochRule rule = {});

// SARAH estimator, expectation, nonsmooth f.
//   tau = ceil(eps^{-1/2}), B0 = ceil(25 ell_f^2 sigma_g^2 / (4 eps^2)),
//   S0 = ceil(3 ell_f sigma_g'^2 / (4 L_g M eps)),
//   b = ceil(25 ell_f^2 ell_g^2 / (M eps^{3/2})), s = ceil(12 ell_f L_g / (M eps^{1/2})).
Schedule schedule_sarah_expect_nonsmooth(const SmoothnessConstants& c, double epsilon, double M,
                                         EpochRule rule = {});

// SARAH estimator, finite sum, smooth f.
//   tau = ceil(sqrt N), inner batches 2 ceil(sqrt N), full anchors.
Schedule schedule_sarah_finite_smooth(std::uint64_t N, double epsilon, double M,
                                      EpochRule rule = {});

// SARAH estimator, expectation, smooth f.
//   tau = ceil(eps^{-1/2}), B0 = ceil(11 L_f sigma_g^2 / (4 eps)),
//   S0 = ceil(3 ell_f^2 sigma_g'^2 / (2 L_g eps)), inner batches 2 ceil(eps^{-1/2}).
Schedule schedule_sarah_expect_smooth(const SmoothnessConstants& c, double epsilon, double M,
                                      EpochRule rule = {});

// Epoch k uses eps_k = 1/k^2 in the smooth expectation formulas, so tau_k = k.
Schedule schedule_adaptive(const SmoothnessConstants& c, std::uint64_t K, double M);

}  // namespace svrpl
