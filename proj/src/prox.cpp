#include "svrpl/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace svrpl {

Vector prox_l1(const Vector& v, double t, double lambda) {
  if (!(t > 0.0)) throw invalid_argument("prox_l1: step must be positive");
  if (!(lambda >= 0.0)) throw invalid_argument("prox_l1: lambda must be nonnegative");
  const double k = t * lambda;
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - k;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

Vector project_simplex(const Vector& v) {
  if (v.size() == 0) throw dimension_error("project_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::stable_sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Vector project_linf_ball(const Vector& v, double radius) {
  if (!(radius > 0.0)) throw invalid_argument("project_linf_ball: radius must be positive");
  return v.array().max(-radius).min(radius).matrix();
}

Vector project_l2_ball(const Vector& v, double radius) {
  if (!(radius > 0.0)) throw invalid_argument("project_l2_ball: radius must be positive");
  const double norm = v.norm();
  if (norm <= radius) return v;
  return v * (radius / norm);
}

double spectral_norm(const Matrix& j) {
  if (j.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = j.rows() <= j.cols() ? Eigen::MatrixXd(j * j.transpose())
                                                    : Eigen::MatrixXd(j.transpose() * j);
  const Eigen::Index k = gram.rows();
  // Fixed, non-symmetric start so that no coordinate direction is orthogonal to it.
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i + 1) / static_cast<double>(k);
  v.normalize();
  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd w = gram * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const bool done = iter > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next);
    lambda = next;
    if (done) break;
  }
  // The Rayleigh quotient of the final vector is at least as accurate as the last estimate.
  lambda = std::max(lambda, v.dot(gram * v));
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace svrpl
