#include "svrpl/estimators.hpp"

namespace svrpl {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::FullBatch: return "full-batch";
    case Scheme::MiniBatch: return "mini-batch";
    case Scheme::SvrgCorrected: return "svrg-corrected";
    case Scheme::Sarah: return "sarah";
  }
  return "unknown";
}

void BatchSpec::validate() const {
  if (size_g < 1 || size_j < 1) throw invalid_argument("BatchSpec: batch sizes must be at least 1");
  if (shared && size_j > size_g)
    throw invalid_argument("BatchSpec: shared batches need size_j <= size_g");
}

Estimator::Estimator(Scheme scheme, const CompositeProblem& problem, std::uint64_t seed)
    : Estimator(scheme, problem, Rng(seed)) {}

Estimator::Estimator(Scheme scheme, const CompositeProblem& problem, Rng rng)
    : scheme_(scheme), problem_(problem), rng_(std::move(rng)) {
  if (scheme_ == Scheme::SvrgCorrected && !problem_.is_finite_sum())
    throw invalid_argument("svrg-corrected estimator needs a finite-sum problem");
}

std::vector<Token> Estimator::draw(std::uint64_t size) {
  std::vector<Token> out;
  out.reserve(size);
  if (auto fs = std::get_if<FiniteSum>(&problem_.regime())) {
    if (size > fs->n)
      throw invalid_argument("batch of " + std::to_string(size) + " exceeds N = " +
                             std::to_string(fs->n));
    if (size == fs->n) {
      for (Token t = 1; t <= fs->n; ++t) out.push_back(t);
      return out;
    }
    for (std::uint64_t i = 0; i < size; ++i) out.push_back(uniform_token(rng_, fs->n));
    return out;
  }
  const auto& ex = std::get<Expectation>(problem_.regime());
  for (std::uint64_t i = 0; i < size; ++i) out.push_back(ex.sampler(rng_));
  return out;
}

std::pair<std::vector<Token>, std::vector<Token>> Estimator::draw_batches(const BatchSpec& b) {
  b.validate();
  auto tokens_g = draw(b.size_g);
  if (b.shared) {
    std::vector<Token> tokens_j(tokens_g.begin(), tokens_g.begin() + static_cast<std::ptrdiff_t>(b.size_j));
    return {std::move(tokens_g), std::move(tokens_j)};
  }
  auto tokens_j = draw(b.size_j);
  return {std::move(tokens_g), std::move(tokens_j)};
}

EstimateOut Estimator::plain_average(const Vector& x, const BatchSpec& b) {
  auto [tg, tj] = draw_batches(b);
  EstimateOut out;
  out.g_tilde = average_map(problem_.oracle(), tg, x);
  out.J_tilde = average_jacobian(problem_.oracle(), tj, x);
  out.calls_g = tg.size();
  out.calls_j = tj.size();
  return out;
}

EstimateOut Estimator::exact_average(const Vector& x) {
  const auto tokens = problem_.reference_tokens();
  if (tokens.empty()) throw invalid_argument("exact estimate needs a reference token set");
  EstimateOut out;
  out.g_tilde = average_map(problem_.oracle(), tokens, x);
  out.J_tilde = average_jacobian(problem_.oracle(), tokens, x);
  out.calls_g = out.calls_j = tokens.size();
  return out;
}

EstimateOut Estimator::anchor_reset(const Vector& x0, const BatchSpec& batch0) {
  check_input(problem_, x0, "anchor_reset");
  batch0.validate();
  const bool finite = problem_.is_finite_sum();
  if (finite) {
    const auto n = problem_.num_components();
    if (batch0.size_g > n || batch0.size_j > n)
      throw invalid_argument("anchor batch exceeds N = " + std::to_string(n));
  }

  EstimateOut out;
  switch (scheme_) {
    case Scheme::FullBatch:
      out = exact_average(x0);
      break;
    case Scheme::MiniBatch:
      out = plain_average(x0, batch0);
      break;
    case Scheme::SvrgCorrected:
    case Scheme::Sarah:
      if (finite) {
        const auto n = problem_.num_components();
        if (batch0.size_g != n || batch0.size_j != n)
          throw invalid_argument(to_string(scheme_) + ": finite-sum anchors must use the full batch N = " +
                                 std::to_string(n));
        out = exact_average(x0);
      } else {
        out = plain_average(x0, batch0);
      }
      break;
  }

  if (scheme_ == Scheme::SvrgCorrected) {
    anchor_x_ = x0;
    anchor_g_ = out.g_tilde;
    anchor_J_ = out.J_tilde;
  } else if (scheme_ == Scheme::Sarah) {
    running_g_ = out.g_tilde;
    running_J_ = out.J_tilde;
    prev_x_ = x0;
  }
  anchored_ = true;
  return out;
}

EstimateOut Estimator::inner_update(const Vector& x, const BatchSpec& batch) {
  check_input(problem_, x, "inner_update");
  if (!anchored_ && (scheme_ == Scheme::SvrgCorrected || scheme_ == Scheme::Sarah))
    throw invalid_argument(to_string(scheme_) + ": inner_update called before anchor_reset");

  switch (scheme_) {
    case Scheme::FullBatch:
      batch.validate();
      return exact_average(x);
    case Scheme::MiniBatch:
      return plain_average(x, batch);
    case Scheme::SvrgCorrected: {
      auto [tg, tj] = draw_batches(batch);
      const ComponentOracle& g = problem_.oracle();
      const Vector d = x - anchor_x_;
      Vector corr = Vector::Zero(problem_.m());
      for (Token t : tg) corr += g.map(t, x) - g.map(t, anchor_x_) - g.jacobian(t, anchor_x_) * d;
      corr /= static_cast<double>(tg.size());
      Matrix jcorr = Matrix::Zero(problem_.m(), problem_.n());
      for (Token t : tj) jcorr += g.jacobian(t, x) - g.jacobian(t, anchor_x_);
      jcorr /= static_cast<double>(tj.size());

      EstimateOut out;
      out.g_tilde = anchor_g_ + anchor_J_ * d + corr;
      out.J_tilde = anchor_J_ + jcorr;
      out.calls_g = tg.size();
      out.calls_j = tj.size();
      return out;
    }
    case Scheme::Sarah: {
      auto [tg, tj] = draw_batches(batch);
      const ComponentOracle& g = problem_.oracle();
      Vector diff = Vector::Zero(problem_.m());
      for (Token t : tg) diff += g.map(t, x) - g.map(t, prev_x_);
      diff /= static_cast<double>(tg.size());
      Matrix jdiff = Matrix::Zero(problem_.m(), problem_.n());
      for (Token t : tj) jdiff += g.jacobian(t, x) - g.jacobian(t, prev_x_);
      jdiff /= static_cast<double>(tj.size());

      running_g_ += diff;
      running_J_ += jdiff;
      prev_x_ = x;
      EstimateOut out;
      out.g_tilde = running_g_;
      out.J_tilde = running_J_;
      out.calls_g = tg.size();
      out.calls_j = tj.size();
      return out;
    }
  }
  throw invalid_argument("inner_update: unknown scheme");
}

}  // namespace svrpl
