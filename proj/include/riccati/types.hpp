#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace riccati {

template <typename Real>
using ComplexT = std::complex<Real>;

template <typename Real, int N>
using SquareC = Eigen::Matrix<std::complex<Real>, N, N>;

template <typename Real, int N>
using VectorCT = Eigen::Matrix<std::complex<Real>, N, 1>;

using Complex = std::complex<double>;
using Matrix2c = SquareC<double, 2>;
using Matrix3c = SquareC<double, 3>;
using Vector2c = VectorCT<double, 2>;
using Vector3c = VectorCT<double, 3>;
using VectorXc = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kTwoPiI{0.0, 2.0 * kPi};

enum class ErrorKind {
  DegenerateMatrix,
  IllConditioned,
  ZeroArgument,
  ZeroVector,
  DegenerateConfiguration,
  ArityMismatch,
  BranchCutHit,
  IntegrationFailure,
  PoleOnPath,
  RoutingFailure,
  UnclassifiableGenerator,
  NotRiccati,
  InvalidArgument,
  ParseError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!is_finite(m(i, j))) return false;
  return true;
}

}  // namespace riccati
