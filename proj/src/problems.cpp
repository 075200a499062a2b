#include "svrpl/problems.hpp"

#include "svrpl/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace svrpl {

double standard_normal(Rng& rng) {
  double u = uniform_unit(rng);
  while (u <= 0.0) u = uniform_unit(rng);
  const double v = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

namespace {

Vector normal_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * standard_normal(rng);
  return v;
}

Matrix normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = scale * standard_normal(rng);
  return a;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

double root_sum_squares(const double (&v)[4]) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::size_t row_of(Token t, Eigen::Index rows) {
  if (t < 1 || t > static_cast<Token>(rows))
    throw invalid_argument("token " + std::to_string(t) + " outside 1.." + std::to_string(rows));
  return static_cast<std::size_t>(t - 1);
}

class MultiLossOracle final : public ComponentOracle {
 public:
  MultiLossOracle(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {}

  Eigen::Index input_dim() const override { return a_.cols(); }
  Eigen::Index output_dim() const override { return 4; }

  Vector map(Token t, const Vector& x) const override {
    const auto j = row_of(t, a_.rows());
    const double z = b_[j] * a_.row(j).dot(x);
    const double s = sigmoid(-z);
    Vector out(4);
    out[0] = 1.0 - std::tanh(z);
    out[1] = s * s;
    out[2] = softplus(-z) - softplus(-z - 1.0);
    out[3] = std::log1p((z - 1.0) * (z - 1.0));
    return out;
  }

  Matrix jacobian(Token t, const Vector& x) const override {
    const auto j = row_of(t, a_.rows());
    const double z = b_[j] * a_.row(j).dot(x);
    const double th = std::tanh(z);
    const double s = sigmoid(-z);
    const double u = z - 1.0;
    const double slope[4] = {
        -(1.0 - th * th),
        -2.0 * s * s * (1.0 - s),
        -s + sigmoid(-z - 1.0),
        2.0 * u / (1.0 + u * u),
    };
    Matrix out(4, a_.cols());
    for (int r = 0; r < 4; ++r) out.row(r) = (slope[r] * b_[j]) * a_.row(j);
    return out;
  }

 private:
  Matrix a_;
  Vector b_;
};

SmoothnessConstants multiloss_mapping_constants(const MultiLossInstance& inst) {
  const double c1 = root_sum_squares(kMultilossSlopeBound);
  const double c2 = root_sum_squares(kMultilossCurvatureBound);
  std::vector<double> lg, Lg;
  for (Eigen::Index j = 0; j < inst.features.rows(); ++j) {
    const double an = inst.features.row(j).norm();
    lg.push_back(c1 * an);
    Lg.push_back(c2 * an * an);
  }
  SmoothnessConstants c;
  c.ell_g = rms(lg);
  c.L_g = rms(Lg);
  return c;
}

}  // namespace

void MultiLossInstance::validate() const {
  if (features.rows() == 0) throw invalid_argument("multiloss: no data");
  if (labels.size() != features.rows()) throw dimension_error("multiloss: label count differs from rows");
  for (Eigen::Index j = 0; j < labels.size(); ++j)
    if (labels[j] != 1.0 && labels[j] != -1.0)
      throw invalid_argument("multiloss: label at row " + std::to_string(j + 1) + " is not +1/-1");
  if (!features.allFinite()) throw invalid_argument("multiloss: non-finite feature");
  if (!(beta >= 0.0)) throw invalid_argument("multiloss: beta must be nonnegative");
}

CompositeProblem multiloss_oracle(const MultiLossInstance& inst) {
  inst.validate();
  auto c = multiloss_mapping_constants(inst);
  c.ell_f = 2.0;  // sqrt(m) for the l1 norm on R^4
  auto oracle = std::make_shared<MultiLossOracle>(inst.features, inst.labels);
  const auto N = static_cast<std::uint64_t>(inst.features.rows());
  Regularizer reg = inst.beta > 0.0 ? Regularizer(L1Reg{inst.beta}) : Regularizer(ZeroReg{});
  return CompositeProblem(oracle, FiniteSum{N}, L1Norm{}, reg, c, "multiloss");
}

CompositeProblem multiloss_smooth_oracle(const MultiLossInstance& inst, double radius) {
  inst.validate();
  if (!(radius > 0.0)) throw invalid_argument("multiloss_smooth: radius must be positive");
  auto c = multiloss_mapping_constants(inst);
  double amax = 0.0;
  for (Eigen::Index j = 0; j < inst.features.rows(); ++j)
    amax = std::max(amax, inst.features.row(j).norm());
  // Row ranges on the ball: 0 < phi_1 < 2, 0 < phi_2 < 1, 0 < phi_3 < 1,
  // 0 <= phi_4 <= log(1 + (|z| + 1)^2).
  const double zmax = amax * radius;
  const double r4 = std::log1p((zmax + 1.0) * (zmax + 1.0));
  const double gmax = std::sqrt(4.0 + 1.0 + 1.0 + r4 * r4);
  c.ell_f = 2.0 * gmax;
  c.L_f = 2.0;
  c.domain_radius = radius;
  auto oracle = std::make_shared<MultiLossOracle>(inst.features, inst.labels);
  const auto N = static_cast<std::uint64_t>(inst.features.rows());
  return CompositeProblem(oracle, FiniteSum{N}, SquaredNorm{1.0}, ZeroReg{}, c, "multiloss-smooth");
}

MultiLossInstance synthetic_multiloss(std::uint64_t N, Eigen::Index n, std::uint64_t seed,
                                      double scale, double flip, double beta) {
  if (N == 0 || n <= 0) throw invalid_argument("synthetic_multiloss: empty shape");
  Rng rng(seed);
  const Vector w = normal_vector(rng, n);
  MultiLossInstance inst;
  inst.features = normal_matrix(rng, static_cast<Eigen::Index>(N), n, scale);
  inst.labels.resize(static_cast<Eigen::Index>(N));
  for (Eigen::Index j = 0; j < inst.labels.size(); ++j) {
    double label = inst.features.row(j).dot(w) >= 0.0 ? 1.0 : -1.0;
    if (uniform_unit(rng) < flip) label = -label;
    inst.labels[j] = label;
  }
  inst.beta = beta;
  return inst;
}

double smoothed_hinge(double u, double beta, double gamma) {
  return (std::sqrt(u * u + gamma * gamma) - u - gamma) / (2.0 * beta);
}

namespace {

class PortfolioOracle final : public ComponentOracle {
 public:
  PortfolioOracle(Matrix r, double beta, double gamma)
      : r_(std::move(r)), beta_(beta), gamma_(gamma) {}

  Eigen::Index input_dim() const override { return r_.cols() + 1; }
  Eigen::Index output_dim() const override { return 2; }

  Vector map(Token t, const Vector& v) const override {
    const auto i = row_of(t, r_.rows());
    const auto d = r_.cols();
    const double ret = r_.row(i).dot(v.head(d));
    const double tau = v[d];
    Vector out(2);
    out[0] = -ret;
    out[1] = tau + smoothed_hinge(ret + tau, beta_, gamma_);
    return out;
  }

  Matrix jacobian(Token t, const Vector& v) const override {
    const auto i = row_of(t, r_.rows());
    const auto d = r_.cols();
    const double u = r_.row(i).dot(v.head(d)) + v[d];
    const double slope = (u / std::sqrt(u * u + gamma_ * gamma_) - 1.0) / (2.0 * beta_);
    Matrix out = Matrix::Zero(2, d + 1);
    out.row(0).head(d) = -r_.row(i);
    out.row(1).head(d) = slope * r_.row(i);
    out(1, d) = 1.0 + slope;
    return out;
  }

 private:
  Matrix r_;
  double beta_, gamma_;
};

}  // namespace

void PortfolioInstance::validate() const {
  if (returns.rows() == 0 || returns.cols() == 0) throw invalid_argument("portfolio: empty returns");
  if (!returns.allFinite()) throw invalid_argument("portfolio: non-finite return");
  if (!(beta > 0.0 && beta < 1.0)) throw invalid_argument("portfolio: CVaR level must lie in (0, 1)");
  if (!(rho > 0.0)) throw invalid_argument("portfolio: rho must be positive");
  if (!(gamma > 0.0)) throw invalid_argument("portfolio: gamma must be positive");
}

CompositeProblem portfolio_oracle(const PortfolioInstance& inst) {
  inst.validate();
  const auto d = inst.returns.cols();
  std::vector<double> lg, Lg;
  for (Eigen::Index i = 0; i < inst.returns.rows(); ++i) {
    const double rn = inst.returns.row(i).norm();
    const double ext = std::sqrt(rn * rn + 1.0);  // ||(r_i, 1)||
    lg.push_back(rn + ext / inst.beta + 1.0);
    Lg.push_back(ext * ext / (2.0 * inst.beta * inst.gamma));
  }
  SmoothnessConstants c;
  c.ell_f = std::sqrt(1.0 + inst.rho * inst.rho);
  c.ell_g = rms(lg);
  c.L_g = rms(Lg);
  auto oracle = std::make_shared<PortfolioOracle>(inst.returns, inst.beta, inst.gamma);
  const auto N = static_cast<std::uint64_t>(inst.returns.rows());
  return CompositeProblem(oracle, FiniteSum{N}, AffinePlusHinge{inst.rho}, SimplexIndicator{d}, c,
                          "portfolio");
}

Vector portfolio_start(const PortfolioInstance& inst) {
  const auto d = inst.returns.cols();
  Vector v = Vector::Zero(d + 1);
  v.head(d).setConstant(1.0 / static_cast<double>(d));
  return v;
}

PortfolioInstance synthetic_portfolio(std::uint64_t N, Eigen::Index d, std::uint64_t seed,
                                      double beta, double rho, double gamma) {
  if (N == 0 || d <= 0) throw invalid_argument("synthetic_portfolio: empty shape");
  Rng rng(seed);
  constexpr Eigen::Index factors = 3;
  const Vector mu = normal_vector(rng, d, 0.002).array() + 0.001;
  const Matrix load = normal_matrix(rng, d, factors, 0.02);
  PortfolioInstance inst;
  inst.returns.resize(static_cast<Eigen::Index>(N), d);
  for (Eigen::Index i = 0; i < inst.returns.rows(); ++i) {
    const Vector f = normal_vector(rng, factors);
    inst.returns.row(i) = (mu + load * f + normal_vector(rng, d, 0.01)).transpose();
  }
  inst.beta = beta;
  inst.rho = rho;
  inst.gamma = gamma;
  return inst;
}

SyntheticProblem linear_least_squares(std::uint64_t N, Eigen::Index m, Eigen::Index n,
                                      std::uint64_t seed, double coeff) {
  if (N == 0 || m <= 0 || n <= 0) throw invalid_argument("linear_least_squares: empty shape");
  Rng rng(seed);
  const Matrix base = normal_matrix(rng, m, n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<Matrix> A;
  std::vector<Vector> b;
  Matrix abar = Matrix::Zero(m, n);
  Vector bbar = Vector::Zero(m);
  std::vector<double> lg;
  for (std::uint64_t i = 0; i < N; ++i) {
    A.push_back(base + normal_matrix(rng, m, n, 0.3 / std::sqrt(static_cast<double>(n))));
    b.push_back(normal_vector(rng, m));
    abar += A.back();
    bbar += b.back();
    lg.push_back(spectral_norm(A.back()));
  }
  abar /= static_cast<double>(N);
  bbar /= static_cast<double>(N);

  auto oracle = std::make_shared<FunctionOracle>(
      n, m, [A, b](Token t, const Vector& x) -> Vector { return A.at(t - 1) * x - b.at(t - 1); },
      [A](Token t, const Vector&) -> Matrix { return A.at(t - 1); });

  const double radius = 5.0;
  SmoothnessConstants c;
  c.ell_g = rms(lg);
  c.L_g = 0.0;
  c.L_f = 2.0 * coeff;
  c.ell_f = 2.0 * coeff * (spectral_norm(abar) * radius + bbar.norm());
  c.domain_radius = radius;

  SyntheticProblem out{CompositeProblem(oracle, FiniteSum{N}, SquaredNorm{coeff}, ZeroReg{}, c,
                                        "linear-least-squares"),
                       Vector::Zero(n), std::nullopt};
  const Eigen::MatrixXd dense = abar;
  out.stationary = dense.colPivHouseholderQr().solve(Eigen::VectorXd(bbar));
  return out;
}

SyntheticProblem shifted_identity(std::uint64_t N, Eigen::Index n, std::uint64_t seed) {
  if (N == 0 || n <= 0) throw invalid_argument("shifted_identity: empty shape");
  Rng rng(seed);
  std::vector<Vector> shifts;
  Vector mean = Vector::Zero(n);
  for (std::uint64_t i = 0; i < N; ++i) {
    shifts.push_back(normal_vector(rng, n));
    mean += shifts.back();
  }
  mean /= static_cast<double>(N);
  auto oracle = std::make_shared<FunctionOracle>(
      n, n, [shifts](Token t, const Vector& x) -> Vector { return x + shifts.at(t - 1); },
      [n](Token, const Vector&) -> Matrix { return Matrix::Identity(n, n); });
  SmoothnessConstants c;
  c.ell_f = std::sqrt(static_cast<double>(n));
  c.ell_g = 1.0;
  c.L_g = 0.0;
  return {CompositeProblem(oracle, FiniteSum{N}, L1Norm{}, ZeroReg{}, c, "shifted-identity"),
          Vector::Zero(n), Vector(-mean)};
}

SyntheticProblem truncated_sg(std::uint64_t N, Eigen::Index n, std::uint64_t seed, double radius) {
  if (N == 0 || n <= 0) throw invalid_argument("truncated_sg: empty shape");
  Rng rng(seed);
  std::vector<Vector> centers;
  Vector mean = Vector::Zero(n);
  for (std::uint64_t i = 0; i < N; ++i) {
    centers.push_back(normal_vector(rng, n));
    mean += centers.back();
  }
  mean /= static_cast<double>(N);
  double floor = 0.0;
  std::vector<double> lg;
  for (const auto& ci : centers) {
    floor += 0.5 * (ci - mean).squaredNorm();
    lg.push_back(radius + ci.norm());
  }
  floor /= static_cast<double>(N);

  auto oracle = std::make_shared<FunctionOracle>(
      n, 1,
      [centers](Token t, const Vector& x) -> Vector {
        return Vector::Constant(1, 0.5 * (x - centers.at(t - 1)).squaredNorm());
      },
      [centers](Token t, const Vector& x) -> Matrix {
        return (x - centers.at(t - 1)).transpose();
      });
  SmoothnessConstants c;
  c.ell_f = 1.0;
  c.ell_g = rms(lg);
  c.L_g = 1.0;
  c.domain_radius = radius;
  Vector x0 = Vector::Zero(n);
  x0[0] = 0.5 * radius;
  return {CompositeProblem(oracle, FiniteSum{N}, TruncatedIdentity{floor}, ZeroReg{}, c,
                           "truncated-sg"),
          x0, mean};
}

SyntheticProblem quadratic_bowl(std::uint64_t N, Eigen::Index m, Eigen::Index n,
                                std::uint64_t seed, double radius) {
  if (N == 0 || m <= 0 || n <= 0) throw invalid_argument("quadratic_bowl: empty shape");
  Rng rng(seed);
  struct Piece {
    Matrix A;
    double q;
    Vector u;
    Vector c;
  };
  std::vector<Piece> pieces;
  std::vector<double> lg, Lg;
  for (std::uint64_t i = 0; i < N; ++i) {
    Piece p;
    p.A = normal_matrix(rng, m, n, 1.0 / std::sqrt(static_cast<double>(n)));
    p.q = 2.0 * uniform_unit(rng) - 1.0;
    p.u = normal_vector(rng, m);
    p.u /= p.u.norm();
    p.c = normal_vector(rng, m, 0.5);
    lg.push_back(spectral_norm(p.A) + std::abs(p.q) * radius);
    Lg.push_back(std::abs(p.q));
    pieces.push_back(std::move(p));
  }
  auto oracle = std::make_shared<FunctionOracle>(
      n, m,
      [pieces](Token t, const Vector& x) -> Vector {
        const auto& p = pieces.at(t - 1);
        return p.A * x + (0.5 * p.q * x.squaredNorm()) * p.u + p.c;
      },
      [pieces](Token t, const Vector& x) -> Matrix {
        const auto& p = pieces.at(t - 1);
        return p.A + p.q * p.u * x.transpose();
      });
  SmoothnessConstants c;
  c.ell_f = 1.0;
  c.ell_g = rms(lg);
  c.L_g = rms(Lg);
  c.domain_radius = radius;
  return {CompositeProblem(oracle, FiniteSum{N}, EuclideanNorm{}, ZeroReg{}, c, "quadratic-bowl"),
          Vector::Constant(n, 0.3), std::nullopt};
}

std::vector<NamedProblem> builtin_problems(std::uint64_t seed) {
  std::vector<NamedProblem> out;
  const auto ml = synthetic_multiloss(200, 10, seed, 1.0, 0.1, 1e-3);
  Rng rng(seed + 1);
  const Vector ml_x0 = normal_vector(rng, 10, 0.1);
  out.push_back({"multiloss", multiloss_oracle(ml), ml_x0});
  out.push_back({"multiloss-smooth", multiloss_smooth_oracle(ml), ml_x0});
  const auto pf = synthetic_portfolio(200, 8, seed + 2);
  out.push_back({"portfolio", portfolio_oracle(pf), portfolio_start(pf)});
  for (auto sp : {linear_least_squares(50, 6, 4, seed + 3), shifted_identity(50, 3, seed + 4),
                  truncated_sg(50, 4, seed + 5), quadratic_bowl(50, 3, 4, seed + 6)}) {
    out.push_back({sp.problem.name(), sp.problem, sp.x0});
  }
  return out;
}

Vector random_point(const CompositeProblem& problem, Rng& rng, double radius) {
  const auto n = problem.n();
  Vector dir = normal_vector(rng, n);
  const double norm = dir.norm();
  if (norm > 0.0) dir /= norm;
  const double r = radius * std::pow(uniform_unit(rng), 1.0 / static_cast<double>(n));
  Vector x = r * dir;
  if (problem.reg().is<SimplexIndicator>()) x = problem.reg().prox(x, 1.0);
  return x;
}

namespace {

Token random_token(const CompositeProblem& problem, Rng& rng) {
  if (auto fs = std::get_if<FiniteSum>(&problem.regime())) return uniform_token(rng, fs->n);
  return std::get<Expectation>(problem.regime()).sampler(rng);
}

}  // namespace

JacobianCheck check_jacobian(const CompositeProblem& problem, std::uint64_t seed, int points,
                             double radius, double rel_tol) {
  Rng rng(seed);
  const ComponentOracle& g = problem.oracle();
  JacobianCheck report;
  for (int p = 0; p < points; ++p) {
    const Vector x = random_point(problem, rng, radius);
    const Token t = random_token(problem, rng);
    const Matrix J = g.jacobian(t, x);
    const double h = 1e-5 * (1.0 + x.norm());
    auto central = [&](Eigen::Index k, double step) -> Vector {
      Vector xp = x, xm = x;
      xp[k] += step;
      xm[k] -= step;
      return (g.map(t, xp) - g.map(t, xm)) / (2.0 * step);
    };
    // Richardson extrapolation of two central differences cancels the h^2
    // term, which matters for sharply curved components such as the
    // smoothed hinge.
    Matrix fd(g.output_dim(), g.input_dim());
    for (Eigen::Index k = 0; k < x.size(); ++k) fd.col(k) = (4.0 * central(k, 0.5 * h) - central(k, h)) / 3.0;
    const double err = (fd - J).norm() / std::max(1.0, J.norm());
    report.worst_rel_error = std::max(report.worst_rel_error, err);
    if (!(err <= rel_tol)) report.passed = false;
    ++report.points;
  }
  return report;
}

std::vector<LipschitzProbe> probe_lipschitz(const CompositeProblem& problem, std::uint64_t seed,
                                            int pairs, double radius) {
  Rng rng(seed);
  const double r = problem.constants().domain_radius.value_or(radius);
  const auto& c = problem.constants();
  LipschitzProbe pf{"ell_f", c.ell_f, 0.0};
  LipschitzProbe pg{"ell_g", c.ell_g, 0.0};
  LipschitzProbe pJ{"L_g", c.L_g, 0.0};
  const auto lip_f = problem.outer().lipschitz(problem.m());
  for (int p = 0; p < pairs; ++p) {
    const Vector x = random_point(problem, rng, r);
    const Vector y = random_point(problem, rng, r);
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    const Vector gx = full_average_map(problem, x), gy = full_average_map(problem, y);
    const Matrix Jx = full_average_jacobian(problem, x), Jy = full_average_jacobian(problem, y);
    const double dg = (gx - gy).norm();
    pg.observed = std::max(pg.observed, dg / dx);
    pJ.observed = std::max(pJ.observed, spectral_norm(Jx - Jy) / dx);
    if (dg > 0.0)
      pf.observed = std::max(pf.observed, std::abs(problem.outer().value(gx) - problem.outer().value(gy)) / dg);
    if (lip_f) {
      // Globally Lipschitz outer functions are also probed off the range of g.
      const Vector u = normal_vector(rng, problem.m(), 3.0), v = normal_vector(rng, problem.m(), 3.0);
      const double du = (u - v).norm();
      if (du > 0.0)
        pf.observed = std::max(pf.observed, std::abs(problem.outer().value(u) - problem.outer().value(v)) / du);
    }
  }
  return {pf, pg, pJ};
}

}  // namespace svrpl
