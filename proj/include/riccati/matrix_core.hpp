#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "riccati/types.hpp"

namespace riccati {

/// Monic cubic t^3 + c2 t^2 + c1 t + c0.
struct CharPoly {
  Complex c0, c1, c2;

  Complex operator()(const Complex& t) const { return ((t + c2) * t + c1) * t + c0; }
  Complex derivative(const Complex& t) const { return (3.0 * t + 2.0 * c2) * t + c1; }
};

/// Coefficients of det(tI - M) for a 3x3 matrix.
template <typename Derived>
CharPoly char_poly(const Eigen::MatrixBase<Derived>& m) {
  static_assert(Derived::RowsAtCompileTime == 3 && Derived::ColsAtCompileTime == 3);
  const Complex trace = m.trace();
  const Complex minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                         m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return {-m.determinant(), minors, -trace};
}

/// Roots of a monic cubic by Cardano's formula, each refined by one guarded Newton step.
std::array<Complex, 3> cubic_roots(const CharPoly& poly);

struct EigenCluster {
  Complex value;
  int algebraic = 0;
  int geometric = 0;
};

struct EigenData {
  std::vector<EigenCluster> clusters;  // ordered by |value| descending, then Arg ascending
  double clustering_tol = 1e-8;
  bool near_threshold = false;  // some multiplicity decision fell within 10x of tol
};

/// Eigenvalue clusters of an invertible 3x3 matrix with algebraic and geometric multiplicities.
///
/// Multiplicities are decided in coefficient space: a cluster of size m around c is accepted
/// when p and its first m-1 derivatives (scaled by the spectral radius) vanish at c within tol.
/// This is stable under the O(eps^(1/m)) splitting that floating-point perturbation causes in
/// the roots of a polynomial with an m-fold root.
EigenData eigen_structure(const Matrix3c& m, double tol = 1e-8);

enum class JordanCase { I, II1, II2, III1, III2, III3 };

const char* to_string(JordanCase c);
JordanCase jordan_case_from_string(const std::string& s);

struct JordanDecomposition {
  Matrix3c J;  // Jordan form, blocks ordered as the classification normal forms
  Matrix3c P;  // conjugator with M = P^-1 J P
  JordanCase case_tag = JordanCase::I;
  EigenData eigen;
  double conjugator_condition = 1.0;
};

JordanDecomposition jordan_form(const Matrix3c& m, double tol = 1e-8);

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
template <typename Derived>
typename Derived::PlainObject mat_exp(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

  const Real norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > Real(0.5)) squarings = static_cast<int>(std::ceil(std::log2(norm / Real(0.5))));

  const Plain a = m / std::ldexp(Real(1), squarings);
  Plain result = Plain::Identity(m.rows(), m.cols());
  Plain term = Plain::Identity(m.rows(), m.cols());
  for (int k = 1; k <= 40; ++k) {
    term = (term * a) / Real(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= std::numeric_limits<Real>::epsilon() * result.cwiseAbs().maxCoeff())
      break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// alpha with exp(2 pi i alpha) = lambda, principal branch Arg in (-pi, pi], shifted by winding.
template <typename Real>
std::complex<Real> alpha_from_lambda(const std::complex<Real>& lambda, int winding = 0) {
  if (lambda == std::complex<Real>(0)) throw Error(ErrorKind::ZeroArgument, "alpha_from_lambda(0)");
  const Real pi = Real(kPi);
  Real arg = std::arg(lambda);
  if (arg <= -pi) arg = pi;
  const std::complex<Real> log_lambda(std::log(std::abs(lambda)), arg);
  return log_lambda / std::complex<Real>(0, 2 * pi) + std::complex<Real>(Real(winding));
}

/// Sine of the angle between two complex lines, via the Lagrange identity.
double sin_angle(const Vector3c& a, const Vector3c& b);

/// Unit norm, with the first entry of (near-)maximal modulus made real positive.
Vector3c normalize_point(const Vector3c& v);

/// Unit Frobenius norm, with the first entry of (near-)maximal modulus made real positive.
Matrix3c normalize_projective(const Matrix3c& m);

}  // namespace riccati
