#pragma once

#include "svrpl/problem.hpp"
#include "svrpl/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace svrpl {

enum class Scheme {
  FullBatch,      // exact g(x), g'(x) every iteration
  MiniBatch,      // fresh mini-batch averages every iteration
  SvrgCorrected,  // SVRG control variate, first-order corrected for g
  Sarah,          // SARAH/SPIDER recursive differences
};

std::string to_string(Scheme s);

struct BatchSpec {
  std::uint64_t size_g = 1;
  std::uint64_t size_j = 1;
  // The Jacobian batch is the first size_j tokens of the map batch.
  bool shared = false;

  void validate() const;
};

struct EstimateOut {
  Vector g_tilde;
  Matrix J_tilde;
  // Sampled components charged to this estimate. A component drawn into a
  // batch counts once even when the scheme evaluates it at two points.
  std::uint64_t calls_g = 0;
  std::uint64_t calls_j = 0;
};

/// Per-run estimator state. Produces (g_tilde, J_tilde) for each iteration
/// and owns the run's random stream.
///
/// Batch conventions:
///   - finite sums sample with replacement from 1..N;
///   - a batch of size exactly N in a finite sum is the full index set, taken
///     in ascending order without sampling;
///   - batches larger than N are rejected;
///   - expectation regimes draw every batch from the sampler, independently.
class Estimator {
 public:
  Estimator(Scheme scheme, const CompositeProblem& problem, std::uint64_t seed);
  Estimator(Scheme scheme, const CompositeProblem& problem, Rng rng);

  Scheme scheme() const { return scheme_; }

  // Epoch start. SvrgCorrected needs a finite sum and a full anchor batch;
  // Sarah on a finite sum also needs a full batch. Sarah on an expectation
  // regime, MiniBatch and FullBatch use batch0 as a regular batch.
  EstimateOut anchor_reset(const Vector& x0, const BatchSpec& batch0);

  // One inner iteration at x. Svrg/Sarah require a prior anchor_reset.
  EstimateOut inner_update(const Vector& x, const BatchSpec& batch);

  Rng& rng() { return rng_; }

 private:
  std::vector<Token> draw(std::uint64_t size);
  std::pair<std::vector<Token>, std::vector<Token>> draw_batches(const BatchSpec& b);
  EstimateOut plain_average(const Vector& x, const BatchSpec& b);
  EstimateOut exact_average(const Vector& x);

  Scheme scheme_;
  CompositeProblem problem_;
  Rng rng_;
  bool anchored_ = false;

  // SvrgCorrected: anchor point and exact anchor values.
  Vector anchor_x_;
  Vector anchor_g_;
  Matrix anchor_J_;
  // Sarah: running estimates and the previous iterate.
  Vector running_g_;
  Matrix running_J_;
  Vector prev_x_;
};

}  // namespace svrpl
