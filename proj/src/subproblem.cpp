#include "svrpl/subproblem.hpp"

#include "svrpl/prox.hpp"

#include <cmath>
#include <limits>

namespace svrpl {

double ProxLinearModel::value(const Vector& x) const {
  const Vector d = x - x_bar;
  const double h = reg.value(x);
  if (!std::isfinite(h)) return std::numeric_limits<double>::infinity();
  return outer.value(g_tilde + J_tilde * d) + h + 0.5 * M * d.squaredNorm();
}

void ProxLinearModel::validate() const {
  if (!(M > 0.0) || !std::isfinite(M)) throw invalid_argument("ProxLinearModel: M must be positive");
  if (J_tilde.rows() != g_tilde.size() || J_tilde.cols() != x_bar.size())
    throw dimension_error("ProxLinearModel: J_tilde is " + std::to_string(J_tilde.rows()) + "x" +
                          std::to_string(J_tilde.cols()) + ", expected " +
                          std::to_string(g_tilde.size()) + "x" + std::to_string(x_bar.size()));
  if (auto need = outer.required_dim(); need && *need != g_tilde.size())
    throw dimension_error("ProxLinearModel: outer " + outer.name() + " needs m = " +
                          std::to_string(*need));
  if (!x_bar.allFinite() || !g_tilde.allFinite() || !J_tilde.allFinite())
    throw invalid_argument("ProxLinearModel: non-finite data");
}

SubproblemSolution solve(const ProxLinearModel& model, double tol, int max_iters) {
  model.validate();
  if (!(tol > 0.0)) throw invalid_argument("solve: tol must be positive");
  if (model.reg.is<ZeroReg>()) {
    if (model.outer.is<SquaredNorm>()) return solve_gauss_newton(model);
    if (model.outer.is<TruncatedIdentity>()) return solve_truncated(model);
  }
  return solve_dual(model, tol, max_iters);
}

SubproblemSolution solve_gauss_newton(const ProxLinearModel& model) {
  model.validate();
  if (!model.outer.is<SquaredNorm>() || !model.reg.is<ZeroReg>())
    throw invalid_argument("solve_gauss_newton: needs f = SquaredNorm and h = 0");
  const double c2 = 2.0 * model.outer.as<SquaredNorm>().coeff;
  const Matrix& J = model.J_tilde;
  const auto m = J.rows();
  const auto n = J.cols();

  Vector d;
  if (m < n) {
    Eigen::MatrixXd sys = c2 * (J * J.transpose());
    sys.diagonal().array() += model.M;
    const Eigen::VectorXd w = sys.llt().solve(model.g_tilde);
    d = -c2 * (J.transpose() * w);
  } else {
    Eigen::MatrixXd sys = c2 * (J.transpose() * J);
    sys.diagonal().array() += model.M;
    d = sys.llt().solve(-c2 * (J.transpose() * model.g_tilde));
  }
  SubproblemSolution out;
  out.x_plus = model.x_bar + d;
  out.path = SolvePath::GaussNewton;
  return out;
}

SubproblemSolution solve_truncated(const ProxLinearModel& model) {
  model.validate();
  if (!model.outer.is<TruncatedIdentity>() || !model.reg.is<ZeroReg>())
    throw invalid_argument("solve_truncated: needs f = TruncatedIdentity and h = 0");
  const double floor = model.outer.as<TruncatedIdentity>().floor;
  const double excess = model.g_tilde[0] - floor;
  const Vector jt = model.J_tilde.row(0).transpose();
  const double jsq = jt.squaredNorm();

  SubproblemSolution out;
  out.path = SolvePath::Truncated;
  out.x_plus = model.x_bar;
  if (jsq == 0.0) {
    out.degenerate_jacobian = excess > 0.0;
    return out;
  }
  const double step = std::max(0.0, std::min(1.0 / model.M, excess / jsq));
  out.x_plus -= step * jt;
  return out;
}

SubproblemSolution solve_dual(const ProxLinearModel& model, double tol, int max_iters) {
  model.validate();
  if (!(tol > 0.0)) throw invalid_argument("solve_dual: tol must be positive");
  if (max_iters < 1) throw invalid_argument("solve_dual: max_iters must be positive");

  const OuterFunction& f = model.outer;
  const Matrix& J = model.J_tilde;
  const double M = model.M;
  const double jnorm = spectral_norm(J);
  const double lip = jnorm * jnorm / M + f.conjugate_curvature();
  // With a linear dual objective any step works; a long one lands on the
  // maximizing face at once.
  const double step = lip > 0.0 ? 1.0 / lip : 1e12;

  struct Eval {
    Vector x;
    double primal;
    double dual;
    Vector grad;
  };
  auto evaluate = [&](const Vector& y) {
    Eval e;
    const Vector jty = J.transpose() * y;
    e.x = model.reg.prox(model.x_bar - jty / M, 1.0 / M);
    const Vector d = e.x - model.x_bar;
    double h = model.reg.value(e.x);
    if (!std::isfinite(h)) h = 0.0;  // prox output sits on dom h up to rounding
    const Vector z = model.g_tilde + J * d;
    const double prox_term = h + 0.5 * M * d.squaredNorm();
    e.primal = f.value(z) + prox_term;
    e.dual = y.dot(model.g_tilde) - f.conjugate_value(y) + jty.dot(d) + prox_term;
    e.grad = z - f.conjugate_gradient(y);
    return e;
  };

  Vector y = f.project_conjugate_domain(Vector::Zero(model.g_tilde.size()));
  Vector best_x, best_y;
  double best_primal = std::numeric_limits<double>::infinity();
  double best_dual = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= max_iters; ++iter) {
    Eval e = evaluate(y);
    if (e.primal < best_primal) {
      best_primal = e.primal;
      best_x = e.x;
    }
    if (e.dual > best_dual) {
      best_dual = e.dual;
      best_y = y;
    }
    gap = std::max(0.0, best_primal - best_dual);
    // Absolute tolerance, plus a rounding floor proportional to the values.
    const double floor = 1e-14 * std::max(std::abs(best_primal), std::abs(best_dual));
    if (gap <= tol + floor) {
      SubproblemSolution out;
      // Within tolerance x_bar may still beat the recovered primal; keep the
      // step from increasing the model.
      if (model.reg.in_domain(model.x_bar) && model.value(model.x_bar) < best_primal)
        best_x = model.x_bar;
      out.x_plus = std::move(best_x);
      out.dual_y = std::move(best_y);
      out.gap = gap;
      out.iters = iter;
      out.path = SolvePath::Dual;
      return out;
    }
    y = f.project_conjugate_domain(y + step * e.grad);
  }
  throw SubproblemError("solve_dual: duality gap " + std::to_string(gap) + " above tolerance after " +
                            std::to_string(max_iters) + " iterations",
                        best_x, best_y, gap, max_iters);
}

}  // namespace svrpl
