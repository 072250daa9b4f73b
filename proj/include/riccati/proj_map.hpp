#pragma once

#include <span>

#include "riccati/matrix_core.hpp"

namespace riccati {

/// Element of PGL(3, C): a nonzero matrix up to nonzero scale.
class ProjMap {
 public:
  ProjMap() : matrix_(Matrix3c::Identity()) {}
  explicit ProjMap(const Matrix3c& matrix);

  const Matrix3c& matrix() const { return matrix_; }
  Matrix3c normalized() const { return normalize_projective(matrix_); }

  /// this ∘ inner
  ProjMap compose(const ProjMap& inner) const { return ProjMap(matrix_ * inner.matrix_); }
  ProjMap inverse() const;

  /// Image of a homogeneous point, normalized as normalize_point.
  Vector3c apply(const Vector3c& point) const;

 private:
  Matrix3c matrix_;
};

/// Phase-minimized Frobenius distance between the unit-norm representatives, in [0, sqrt 2].
double projective_distance(const ProjMap& a, const ProjMap& b);

struct Correspondence {
  Vector3c source;
  Vector3c target;
};

struct ProjectiveFit {
  ProjMap map;
  double residual = 0.0;  // max sine of angle between M*source and target
};

/// Direct linear fit of target ~ M * source from at least four correspondences.
ProjectiveFit fit_projective(std::span<const Correspondence> corrs);

}  // namespace riccati
