// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "support.hpp"

#include "svrpl/cli.hpp"
#include "svrpl/driver.hpp"
#include "svrpl/estimators.hpp"
#include "svrpl/metrics.hpp"
#include "svrpl/problems.hpp"
#include "svrpl/prox.hpp"
#include "svrpl/schedule.hpp"
#include "svrpl/subproblem.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace svrpl;
using namespace svrpl::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. solve() against the grid-search oracle.
Outcome subproblem_vs_grid() {
  Rng rng(101);
  double worst_obj = 0.0, worst_arg = 0.0;
  int count = 0;
  for (int i = 0; i < 200; ++i) {
    const auto outer = kAllOuters[i % 6];
    const auto reg = kAllRegs[(i / 6) % 3];
    const auto n = static_cast<Eigen::Index>(1 + i % 3);
    const auto m = static_cast<Eigen::Index>(1 + (i / 3) % 3);
    const auto model = random_model(rng, outer, reg, n, m);
    const auto sol = solve(model);
    const auto grid = grid_argmin(model);
    worst_obj = std::max(worst_obj, std::abs(model.value(sol.x_plus) - grid.value));
    worst_arg = std::max(worst_arg, (sol.x_plus - grid.x).norm());
    ++count;
  }
  return {worst_obj <= 1e-5 && worst_arg <= 1e-3,
          std::to_string(count) + " instances, max |objective diff| " + fmt("%.2e", worst_obj) +
              ", max argmin distance " + fmt("%.2e", worst_arg)};
}

// 2. Closed forms against the dual solver.
Outcome closed_forms_vs_dual() {
  Rng rng(202);
  double worst_gn = 0.0, worst_tr = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + uniform_token(rng, 6));
    const auto m = static_cast<Eigen::Index>(1 + uniform_token(rng, 6));
    const auto model = random_model(rng, OuterKind::Squared, RegKind::Zero, n, m);
    worst_gn = std::max(worst_gn, (solve_gauss_newton(model).x_plus - solve_dual(model, 1e-13).x_plus).norm());
  }
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + uniform_token(rng, 6));
    const auto model = random_model(rng, OuterKind::Truncated, RegKind::Zero, n, 1);
    worst_tr = std::max(worst_tr, (solve_truncated(model).x_plus - solve_dual(model, 1e-13).x_plus).norm());
  }
  return {worst_gn <= 1e-6 && worst_tr <= 1e-6,
          "gauss-newton max diff " + fmt("%.2e", worst_gn) + ", truncated max diff " + fmt("%.2e", worst_tr)};
}

// 3. f(g(x)) <= f(g(y) + g'(y)(x - y)) + ell_f L_g / 2 ||x - y||^2.
Outcome majorization() {
  int violations = 0, problems = 0;
  double worst = -1e300;
  for (const auto& np : builtin_problems()) {
    const auto& p = np.problem;
    Rng rng(303 + problems++);
    const double r = p.constants().domain_radius.value_or(1.0);
    const double c = p.constants().ell_f * p.constants().L_g;
    for (int k = 0; k < 1000; ++k) {
      const Vector x = random_point(p, rng, r), y = random_point(p, rng, r);
      const Vector lin = full_average_map(p, y) + full_average_jacobian(p, y) * (x - y);
      const double excess =
          p.outer().value(full_average_map(p, x)) - p.outer().value(lin) - 0.5 * c * (x - y).squaredNorm();
      worst = std::max(worst, excess);
      if (excess > 1e-12) ++violations;
    }
  }
  return {violations == 0, std::to_string(problems) + " problems x 1000 pairs, " + std::to_string(violations) +
                               " violations, max excess " + fmt("%.2e", worst)};
}

// 4. Variance bounds of the SVRG-corrected estimator.
Outcome variance_bounds() {
  const auto sp = quadratic_bowl(200, 3, 4, 404);
  const auto& p = sp.problem;
  const double Lg = p.constants().L_g;
  Rng prng(405);
  const Vector x0 = random_point(p, prng, 1.0);
  const Vector x = x0 + randn(prng, 4, 0.5);
  const double dist2 = (x - x0).squaredNorm();
  const Vector g = full_average_map(p, x);
  const Matrix J = full_average_jacobian(p, x);

  bool ok = true;
  std::string detail;
  for (std::uint64_t b : {1, 4, 16}) {
    Estimator est(Scheme::SvrgCorrected, p, 406 + b);
    est.anchor_reset(x0, {200, 200, false});
    std::vector<double> eg, eJ;
    for (int k = 0; k < 10000; ++k) {
      const auto out = est.inner_update(x, {b, b, false});
      eg.push_back((out.g_tilde - g).norm());
      eJ.push_back(std::pow(spectral_norm(out.J_tilde - J), 2));
    }
    const double bg = Lg / (2.0 * std::sqrt(double(b))) * dist2;
    const double bJ = Lg * Lg / double(b) * dist2;
    const bool okg = mean(eg) <= bg + 4.0 * standard_error(eg);
    const bool okJ = mean(eJ) <= bJ + 4.0 * standard_error(eJ);
    ok = ok && okg && okJ;
    detail += "B=S=" + std::to_string(b) + ": " + fmt("%.3g", mean(eg)) + "<=" + fmt("%.3g", bg) + "+" +
              fmt("%.2g", 4.0 * standard_error(eg)) + ", " + fmt("%.3g", mean(eJ)) + "<=" + fmt("%.3g", bJ) +
              "+" + fmt("%.2g", 4.0 * standard_error(eJ)) + "; ";
  }
  return {ok, detail};
}

// 5. At the anchor the SVRG-corrected estimate is exact, whatever the batch.
Outcome anchor_exactness() {
  int mismatches = 0;
  for (const auto& np : builtin_problems(11)) {
    const auto& p = np.problem;
    const auto N = p.num_components();
    Rng rng(505);
    Estimator est(Scheme::SvrgCorrected, p, 506);
    for (int k = 0; k < 100 / 7 + 1; ++k) {
      const Vector a = random_point(p, rng, 1.0);
      const auto anchor = est.anchor_reset(a, {N, N, false});
      const Vector g = full_average_map(p, a);
      const Matrix J = full_average_jacobian(p, a);
      const std::uint64_t b = 1 + uniform_token(rng, N - 1);
      const auto out = est.inner_update(a, {b, uniform_token(rng, b), uniform_unit(rng) < 0.5});
      if (!(out.g_tilde.array() == g.array()).all() || !(out.J_tilde.array() == J.array()).all() ||
          !(anchor.g_tilde.array() == g.array()).all())
        ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 105 random anchors"};
}

// 6. Schedule formulas, asserted exactly against hand arithmetic.
Outcome schedule_formulas() {
  bool ok = true;
  std::string detail;
  const auto s1 = schedule_svrg_finite(10000, 0.1, 1.0);
  const auto& e1 = s1.epochs[0];
  ok = ok && e1.tau == 3 && e1.inner.size_g == 6340 && e1.inner.size_j == 40;
  detail += "svrg (" + std::to_string(e1.tau) + "," + std::to_string(e1.inner.size_g) + "," +
            std::to_string(e1.inner.size_j) + ") ";
  const auto s4 = schedule_sarah_finite_smooth(10000, 0.1, 1.0);
  const auto& e4 = s4.epochs[0];
  ok = ok && e4.tau == 100 && e4.inner.size_g == 200 && e4.inner.size_j == 200;
  detail += "sarah-finite (" + std::to_string(e4.tau) + "," + std::to_string(e4.inner.size_g) + ") ";
  SmoothnessConstants c;
  c.ell_f = c.ell_g = c.L_g = 1.0;
  c.sigma_g = c.sigma_gprime = 1.0;
  const auto s3 = schedule_sarah_expect_nonsmooth(c, 0.01, 4.0);
  const auto& e3 = s3.epochs[0];
  ok = ok && e3.tau == 10 && e3.anchor.size_g == 62500 && e3.anchor.size_j == 19 && e3.inner.size_g == 6250 &&
       e3.inner.size_j == 30;
  detail += "sarah-expect (" + std::to_string(e3.tau) + "," + std::to_string(e3.anchor.size_g) + "," +
            std::to_string(e3.anchor.size_j) + "," + std::to_string(e3.inner.size_g) + "," +
            std::to_string(e3.inner.size_j) + ")";
  return {ok, detail};
}

// 7. With f the identity on the first row and h = 0, G_M is the gradient.
Outcome gradient_mapping_identity() {
  auto map = [](Token t, const Vector& x) -> Vector {
    const double w = double(t);
    Vector out(2);
    out[0] = std::sin(w * x[0]) + x[1] * x[1] * x[2] + 0.5 * w * std::exp(0.3 * x[2]);
    out[1] = x[0] - x[1];
    return out;
  };
  auto jac = [](Token t, const Vector& x) -> Matrix {
    const double w = double(t);
    Matrix J(2, 3);
    J << w * std::cos(w * x[0]), 2.0 * x[1] * x[2], x[1] * x[1] + 0.15 * w * std::exp(0.3 * x[2]), 1.0, -1.0, 0.0;
    return J;
  };
  auto oracle = std::make_shared<FunctionOracle>(3, 2, map, jac);
  CompositeProblem p(oracle, FiniteSum{3}, AffinePlusHinge{0.0}, ZeroReg{}, {});
  Rng rng(707);
  double worst = 0.0, worst_inv = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector x = randn(rng, 3);
    Vector grad = Vector::Zero(3);
    for (int t = 1; t <= 3; ++t) {
      const double w = t;
      grad[0] += w * std::cos(w * x[0]) / 3.0;
      grad[1] += 2.0 * x[1] * x[2] / 3.0;
      grad[2] += (x[1] * x[1] + 0.15 * w * std::exp(0.3 * x[2])) / 3.0;
    }
    const Vector g1 = exact_gradient_mapping(p, x, 1.0);
    for (double M : {1.0, 10.0, 100.0}) {
      const Vector gm = exact_gradient_mapping(p, x, M);
      worst = std::max(worst, (gm - grad).norm());
      worst_inv = std::max(worst_inv, (gm - g1).norm());
    }
  }
  return {worst <= 1e-8 && worst_inv <= 1e-8,
          "max |G_M - grad| " + fmt("%.2e", worst) + ", max M-variation " + fmt("%.2e", worst_inv)};
}

// Samples_g at the first trace row with grad_map_sq <= target, or -1.
double samples_to_reach(const std::vector<TraceRecord>& trace, double target) {
  for (const auto& r : trace)
    if (r.grad_map_sq <= target) return double(r.samples_g);
  return -1.0;
}

// 8. Desk-scale ordering of PL, S-PL, SVR-PL and Sarah-PL.
Outcome desk_scale_ordering() {
  const std::uint64_t N = 2000;
  const auto inst = synthetic_multiloss(N, 20, 808);
  const auto p = multiloss_oracle(inst);
  const Vector x0 = Vector::Zero(20);
  const double M = 10.0;  // tuned from {1, 5, 10, 20}, shared by all methods
  const double target = 1e-3;
  RunOptions opts;
  opts.trace_stride = 1;

  const auto pl = run_deterministic_pl(p, M, 60, x0, opts);
  const double pl_samples = samples_to_reach(pl.trace, target);

  // SVR-PL: inner batches ceil(0.1 N^{4/5}), shared; Sarah-PL: eps = 1e-2 so
  // inner batches ceil(0.1 eps^{-3/2}) = 100. Both use exact anchors.
  const std::uint64_t b_svr = batch_size(0.1 * std::pow(double(N), 0.8));
  Schedule svr;
  svr.M = M;
  svr.epochs.assign(12, EpochPlan{10, {N, N, false}, {b_svr, b_svr, true}});
  Schedule sarah;
  sarah.M = M;
  sarah.epochs.assign(12, EpochPlan{10, {N, N, false}, {100, 100, false}});

  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
  std::vector<double> svr_reach, sarah_reach, svr_final, spl_floor;
  bool all_reached = pl_samples > 0;
  for (auto seed : seeds) {
    const auto a = run_svr_pl(p, Scheme::SvrgCorrected, svr, x0, seed, opts);
    const auto b = run_svr_pl(p, Scheme::Sarah, sarah, x0, seed, opts);
    svr_reach.push_back(samples_to_reach(a.trace, target));
    sarah_reach.push_back(samples_to_reach(b.trace, target));
    all_reached = all_reached && svr_reach.back() > 0 && sarah_reach.back() > 0;
    svr_final.push_back(a.trace.back().grad_map_sq);

    // S-PL with batch 500 on the same budget as SVR-PL.
    Schedule spl;
    spl.M = M;
    const std::uint64_t T = a.total_calls_g / 500;
    spl.epochs.push_back(EpochPlan{T, {500, 500, false}, {500, 500, false}});
    RunOptions sopts;
    sopts.trace_stride = 5;
    const auto c = run_minibatch_pl(p, spl, x0, seed, sopts);
    double floor = 1e300;
    for (std::size_t i = c.trace.size() / 2; i < c.trace.size(); ++i) floor = std::min(floor, c.trace[i].grad_map_sq);
    spl_floor.push_back(floor);
  }
  const double svr_mean = mean(svr_reach), sarah_mean = mean(sarah_reach);
  const double svr_acc = mean(svr_final), spl_acc = mean(spl_floor);
  const bool ok = all_reached && svr_mean <= 0.5 * pl_samples && sarah_mean <= 0.5 * pl_samples &&
                  spl_acc > svr_acc && spl_acc > target;
  return {ok, "samples to ||G||^2<=1e-3: PL " + fmt("%.0f", pl_samples) + ", SVR-PL " + fmt("%.0f", svr_mean) +
                  ", Sarah-PL " + fmt("%.0f", sarah_mean) + "; S-PL best late " + fmt("%.2e", spl_acc) +
                  " vs SVR-PL final " + fmt("%.2e", svr_acc)};
}

// 9. Deterministic PL never increases the objective at M = 4 ell_f L_g.
Outcome deterministic_monotone() {
  int violations = 0;
  std::string detail;
  for (const auto& np : builtin_problems()) {
    const double M = np.problem.constants().default_M();
    std::vector<double> phi;
    RunOptions opts;
    opts.subproblem_tol = 1e-12;
    opts.hook = [&](const IterationInfo& info) { phi.push_back(objective_value(np.problem, *info.x)); };
    run_deterministic_pl(np.problem, M, 100, np.x0, opts);
    int v = 0;
    for (std::size_t t = 1; t < phi.size(); ++t)
      if (phi[t] > phi[t - 1] + 1e-10) ++v;
    violations += v;
    detail += np.name + " " + std::to_string(v) + "; ";
  }
  return {violations == 0, detail};
}

// 10. Counters match the schedule and traces are byte-reproducible.
Outcome counters_and_reproducibility() {
  bool ok = true;
  std::string detail;
  const auto sp = quadratic_bowl(300, 3, 4, 1010);
  const auto& p = sp.problem;
  const Schedule s = schedule_svrg_finite(300, 0.5, 4.0, EpochRule{std::nullopt, 3});
  Schedule sarah;
  sarah.M = 4.0;
  sarah.epochs.assign(3, EpochPlan{4, {300, 300, false}, {17, 9, false}});
  RunOptions opts;
  opts.trace_stride = 1;
  for (auto [scheme, sched] : {std::pair{Scheme::SvrgCorrected, s}, std::pair{Scheme::Sarah, sarah}}) {
    const auto r1 = run_svr_pl(p, scheme, sched, sp.x0, 99, opts);
    const auto r2 = run_svr_pl(p, scheme, sched, sp.x0, 99, opts);
    std::ostringstream a, b;
    emit_trace(r1.trace, a);
    emit_trace(r2.trace, b);
    const bool counts = r1.total_calls_g == sched.implied_calls_g() && r1.total_calls_j == sched.implied_calls_j();
    const bool bytes = a.str() == b.str();
    ok = ok && counts && bytes;
    detail += to_string(scheme) + ": calls " + std::to_string(r1.total_calls_g) + "/" +
              std::to_string(sched.implied_calls_g()) + (bytes ? " identical" : " differ") + "; ";
  }
  // Mini-batch schedule: one batch per iteration.
  Schedule mb;
  mb.M = 4.0;
  mb.epochs.push_back(EpochPlan{7, {13, 5, false}, {13, 5, false}});
  const auto r = run_minibatch_pl(p, mb, sp.x0, 5, opts);
  ok = ok && r.total_calls_g == 91 && r.total_calls_j == 35;
  detail += "mini-batch: " + std::to_string(r.total_calls_g) + "/91";
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"subproblem matches grid-search oracle", subproblem_vs_grid},
      {"closed forms agree with dual solver", closed_forms_vs_dual},
      {"majorization on built-in problems", majorization},
      {"estimator variance bounds", variance_bounds},
      {"svrg correction exact at anchor", anchor_exactness},
      {"schedule formulas", schedule_formulas},
      {"gradient mapping equals gradient", gradient_mapping_identity},
      {"desk-scale method ordering", desk_scale_ordering},
      {"deterministic PL monotone", deterministic_monotone},
      {"counters and reproducibility", counters_and_reproducibility},
  };
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
