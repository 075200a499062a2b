#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace svrpl {

using Vector = Eigen::VectorXd;
// Jacobians are stored row-major: row r is the gradient of output r.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Component identifier. Finite sums use 1..N; expectation regimes use
// whatever their sampler emits.
using Token = std::uint64_t;

// One generator per algorithm run.
using Rng = std::mt19937_64;

enum class ErrorKind {
  InvalidArgument,
  Dimension,
  Data,
  Numerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorKind::InvalidArgument, what);
}

inline Error dimension_error(const std::string& what) {
  return Error(ErrorKind::Dimension, what);
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

// Uniform integer in [1, n] by rejection; stable across standard libraries,
// unlike std::uniform_int_distribution.
inline Token uniform_token(Rng& rng, std::uint64_t n) {
  if (n == 0) throw invalid_argument("uniform_token: empty range");
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return 1 + draw % n;
}

// Uniform real in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace svrpl
