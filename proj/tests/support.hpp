#pragma once

// Independent oracles shared by the unit and acceptance tests.

#include "svrpl/problems.hpp"
#include "svrpl/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace svrpl::testing {

inline Vector randn(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * standard_normal(rng);
  return v;
}

inline Matrix randn_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  Matrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = scale * standard_normal(rng);
  return a;
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform_unit(rng); }

struct GridResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
};

// Radius of a box around x_bar that contains the model's minimizer. From
// M-strong convexity: M/2 ||d||^2 <= (decrease of the f and h terms).
inline double model_box_radius(const ProxLinearModel& model) {
  const double n = static_cast<double>(model.x_bar.size());
  double lambda = 0.0;
  if (model.reg.is<L1Reg>()) lambda = model.reg.as<L1Reg>().lambda;
  double r;
  if (model.outer.is<SquaredNorm>()) {
    const double c = model.outer.as<SquaredNorm>().coeff;
    const double a = lambda * std::sqrt(n);
    r = (a + std::sqrt(a * a + 2.0 * model.M * c * model.g_tilde.squaredNorm())) / model.M;
  } else {
    const double lf = *model.outer.lipschitz(model.g_tilde.size());
    r = 2.0 * (lf * model.J_tilde.norm() + lambda * std::sqrt(n)) / model.M;
  }
  return 1.1 * r + 1e-3;
}

// Nested one-dimensional grid search over the model. Minimizing a convex
// function over its trailing coordinates leaves a convex function of the
// leading ones, and a convex function of one variable attains its minimum
// within one cell of its best grid point. Each coordinate is therefore
// searched on `points` values and zoomed to +-1 cell until the cell is below
// `resolution`. Simplex coordinates are parametrized by their first d - 1
// entries, with ranges shrinking as the prefix uses up the unit mass.
inline GridResult grid_argmin(const ProxLinearModel& model, double resolution = 1e-6,
                              int points = 7) {
  const auto n = model.x_bar.size();
  Eigen::Index d = 0;
  if (model.reg.is<SimplexIndicator>()) d = model.reg.as<SimplexIndicator>().d;
  const Eigen::Index simplex_params = d > 0 ? d - 1 : 0;
  const Eigen::Index p = simplex_params + (n - d);
  const double R = model_box_radius(model);

  auto to_x = [&](const std::vector<double>& t) {
    Vector x(n);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < simplex_params; ++k) {
      x[k] = t[k];
      sum += t[k];
    }
    if (d > 0) x[d - 1] = std::max(0.0, 1.0 - sum);
    for (Eigen::Index k = simplex_params; k < p; ++k) x[d + (k - simplex_params)] = t[k];
    return x;
  };

  std::vector<double> t(p);
  // Minimum over coordinates k.. with t[0..k) fixed; leaves the minimizing
  // tail in t.
  std::function<double(Eigen::Index)> search = [&](Eigen::Index k) -> double {
    if (k == p) return model.value(to_x(t));
    double lo, hi;
    if (k < simplex_params) {
      double used = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) used += t[j];
      lo = 0.0;
      hi = std::max(0.0, 1.0 - used);
    } else {
      const double centre = model.x_bar[d + (k - simplex_params)];
      lo = centre - R;
      hi = centre + R;
    }
    const double lo0 = lo, hi0 = hi;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_tail(t.begin() + k, t.end());
    for (;;) {
      const double step = (hi - lo) / (points - 1);
      double level_best = std::numeric_limits<double>::infinity();
      double level_arg = lo;
      for (int i = 0; i < points; ++i) {
        t[k] = lo + i * step;
        const double v = search(k + 1);
        if (v < level_best) {
          level_best = v;
          level_arg = t[k];
        }
        if (v < best) {
          best = v;
          best_tail.assign(t.begin() + k, t.end());
        }
      }
      if (step <= resolution) break;
      lo = std::max(lo0, level_arg - step);
      hi = std::min(hi0, level_arg + step);
    }
    std::copy(best_tail.begin(), best_tail.end(), t.begin() + k);
    return best;
  };

  GridResult out;
  out.value = search(0);
  out.x = to_x(t);
  return out;
}

enum class OuterKind { L1, Squared, Max, L2, Truncated, Hinge };
enum class RegKind { Zero, L1, Simplex };

inline constexpr OuterKind kAllOuters[] = {OuterKind::L1, OuterKind::Squared,   OuterKind::Max,
                                           OuterKind::L2, OuterKind::Truncated, OuterKind::Hinge};
inline constexpr RegKind kAllRegs[] = {RegKind::Zero, RegKind::L1, RegKind::Simplex};

inline ProxLinearModel random_model(Rng& rng, OuterKind outer, RegKind reg, Eigen::Index n,
                                    Eigen::Index m) {
  if (outer == OuterKind::Truncated) m = 1;
  if (outer == OuterKind::Hinge) m = 2;
  ProxLinearModel model;
  model.M = uniform(rng, 0.5, 5.0);
  model.g_tilde = randn(rng, m);
  model.J_tilde = randn_matrix(rng, m, n);
  switch (outer) {
    case OuterKind::L1: model.outer = L1Norm{}; break;
    case OuterKind::Squared: model.outer = SquaredNorm{uniform(rng, 0.5, 1.5)}; break;
    case OuterKind::Max: model.outer = MaxCoordinate{}; break;
    case OuterKind::L2: model.outer = EuclideanNorm{}; break;
    case OuterKind::Truncated: model.outer = TruncatedIdentity{standard_normal(rng)}; break;
    case OuterKind::Hinge: model.outer = AffinePlusHinge{uniform(rng, 0.0, 2.0)}; break;
  }
  model.x_bar = randn(rng, n);
  switch (reg) {
    case RegKind::Zero: model.reg = ZeroReg{}; break;
    case RegKind::L1: model.reg = L1Reg{uniform(rng, 0.0, 1.0)}; break;
    case RegKind::Simplex: {
      const auto d = static_cast<Eigen::Index>(uniform_token(rng, static_cast<std::uint64_t>(n)));
      model.reg = SimplexIndicator{d};
      model.x_bar = model.reg.prox(model.x_bar, 1.0);
      break;
    }
  }
  return model;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double standard_error(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  const double var = s / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace svrpl::testing
