#include "riccati/matrix_core.hpp"

#include <algorithm>
#include <limits>

#include "riccati/proj_map.hpp"

namespace riccati {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::BranchCutHit: return "BranchCutHit";
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
    case ErrorKind::PoleOnPath: return "PoleOnPath";
    case ErrorKind::RoutingFailure: return "RoutingFailure";
    case ErrorKind::UnclassifiableGenerator: return "UnclassifiableGenerator";
    case ErrorKind::NotRiccati: return "NotRiccati";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

const char* to_string(JordanCase c) {
  switch (c) {
    case JordanCase::I: return "I";
    case JordanCase::II1: return "II1";
    case JordanCase::II2: return "II2";
    case JordanCase::III1: return "III1";
    case JordanCase::III2: return "III2";
    case JordanCase::III3: return "III3";
  }
  return "?";
}

JordanCase jordan_case_from_string(const std::string& s) {
  for (auto c : {JordanCase::I, JordanCase::II1, JordanCase::II2, JordanCase::III1, JordanCase::III2,
                 JordanCase::III3})
    if (s == to_string(c)) return c;
  throw Error(ErrorKind::ParseError, "unknown Jordan case '" + s + "'");
}

std::array<Complex, 3> cubic_roots(const CharPoly& poly) {
  const Complex shift = poly.c2 / 3.0;
  const Complex p = poly.c1 - poly.c2 * poly.c2 / 3.0;
  const Complex q = 2.0 * poly.c2 * poly.c2 * poly.c2 / 27.0 - poly.c2 * poly.c1 / 3.0 + poly.c0;

  const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  Complex w = -q / 2.0 + disc;
  if (std::abs(-q / 2.0 - disc) > std::abs(w)) w = -q / 2.0 - disc;

  std::array<Complex, 3> roots;
  if (std::abs(w) == 0.0) {
    roots.fill(-shift);
  } else {
    const Complex u = std::pow(w, 1.0 / 3.0);
    const Complex v = -p / (3.0 * u);
    const Complex omega = std::polar(1.0, 2.0 * kPi / 3.0);
    roots[0] = u + v - shift;
    roots[1] = omega * u + std::conj(omega) * v - shift;
    roots[2] = std::conj(omega) * u + omega * v - shift;
  }

  for (auto& r : roots) {
    const Complex d = poly.derivative(r);
    if (std::abs(d) == 0.0) continue;
    const Complex candidate = r - poly(r) / d;
    if (is_finite(candidate) && std::abs(poly(candidate)) < std::abs(poly(r))) r = candidate;
  }
  return roots;
}

namespace {

// Orders eigenvalues by modulus descending then argument ascending; near-ties in modulus
// fall through to the argument so the order survives rounding noise.
bool cluster_before(const Complex& a, const Complex& b, double tol) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (std::abs(ma - mb) > tol * std::max(ma, mb)) return ma > mb;
  return std::arg(a) < std::arg(b);
}

double spectral_scale(const std::array<Complex, 3>& roots) {
  double s = 0.0;
  for (const auto& r : roots) s = std::max(s, std::abs(r));
  return s;
}

// Normalized size of p and p' at c; both vanish for a double root at c.
double double_root_defect(const CharPoly& poly, const Complex& c, double scale) {
  return std::max(std::abs(poly(c)) / (scale * scale * scale), std::abs(poly.derivative(c)) / (scale * scale));
}

bool near(double value, double tol) { return value > tol / 10.0 && value < tol * 10.0; }

}  // namespace

EigenData eigen_structure(const Matrix3c& m, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");

  Eigen::JacobiSVD<Matrix3c> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(2) <= tol * sv(0))
    throw Error(ErrorKind::DegenerateMatrix, "matrix is not invertible at the given tolerance");

  const CharPoly poly = char_poly(m);
  const std::array<Complex, 3> roots = cubic_roots(poly);
  const double scale = spectral_scale(roots);

  EigenData data;
  data.clustering_tol = tol;

  const Complex mean = -poly.c2 / 3.0;
  const double triple_defect = double_root_defect(poly, mean, scale);
  data.near_threshold = near(triple_defect, tol);

  if (triple_defect <= tol) {
    data.clusters.push_back({mean, 3, 0});
  } else {
    // Try each root as the simple one; the remaining pair is a double root at (trace - r)/2.
    int best = -1;
    double best_defect = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      const Complex pair_mean = (-poly.c2 - roots[k]) / 2.0;
      const double defect = double_root_defect(poly, pair_mean, scale);
      if (defect < best_defect) {
        best_defect = defect;
        best = k;
      }
    }
    data.near_threshold = data.near_threshold || near(best_defect, tol);
    if (best_defect <= tol) {
      data.clusters.push_back({(-poly.c2 - roots[best]) / 2.0, 2, 0});
      data.clusters.push_back({roots[best], 1, 0});
    } else {
      for (const auto& r : roots) data.clusters.push_back({r, 1, 0});
    }
  }

  std::sort(data.clusters.begin(), data.clusters.end(),
            [tol](const EigenCluster& a, const EigenCluster& b) { return cluster_before(a.value, b.value, tol); });

  const double rank_threshold = tol * sv(0);
  for (auto& c : data.clusters) {
    const Matrix3c shifted = m - c.value * Matrix3c::Identity();
    Eigen::JacobiSVD<Matrix3c> shifted_svd(shifted);
    int nullity = 0;
    for (int i = 0; i < 3; ++i) {
      const double s = shifted_svd.singularValues()(i);
      if (s <= rank_threshold) ++nullity;
      if (near(s, rank_threshold)) data.near_threshold = true;
    }
    c.geometric = std::clamp(nullity, 1, c.algebraic);
  }
  return data;
}

namespace {

Vector3c null_vector(const Matrix3c& a) {
  Eigen::JacobiSVD<Matrix3c> svd(a, Eigen::ComputeFullV);
  return normalize_point(svd.matrixV().col(2));
}

Vector3c top_right_singular_vector(const Matrix3c& a) {
  Eigen::JacobiSVD<Matrix3c> svd(a, Eigen::ComputeFullV);
  return normalize_point(svd.matrixV().col(0));
}

// Two-dimensional kernel in reduced column echelon form: the pair of rows with the largest
// minor becomes the identity, so span{e_i, e_j} comes back as exactly {e_i, e_j}.
Eigen::Matrix<Complex, 3, 2> kernel_basis_2d(const Matrix3c& a) {
  Eigen::JacobiSVD<Matrix3c> svd(a, Eigen::ComputeFullV);
  Eigen::Matrix<Complex, 3, 2> k = svd.matrixV().rightCols<2>();

  int best_i = 0, best_j = 1;
  double best = -1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double minor = std::abs(k(i, 0) * k(j, 1) - k(i, 1) * k(j, 0));
      if (minor > best + 1e-12) {
        best = minor;
        best_i = i;
        best_j = j;
      }
    }
  Matrix2c pivot;
  pivot << k(best_i, 0), k(best_i, 1), k(best_j, 0), k(best_j, 1);
  k = k * pivot.inverse();
  for (int c = 0; c < 2; ++c) k.col(c) = normalize_point(k.col(c));
  return k;
}

double condition_number(const Matrix3c& a) {
  Eigen::JacobiSVD<Matrix3c> svd(a);
  const auto& sv = svd.singularValues();
  return sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
}

}  // namespace

JordanDecomposition jordan_form(const Matrix3c& m, double tol) {
  JordanDecomposition out;
  out.eigen = eigen_structure(m, tol);
  const auto& cl = out.eigen.clusters;
  const Matrix3c id = Matrix3c::Identity();

  Matrix3c v = Matrix3c::Zero();  // columns are the Jordan basis: M V = V J
  Matrix3c& j = out.J;
  j.setZero();

  if (cl.size() == 3) {
    out.case_tag = JordanCase::I;
    for (int k = 0; k < 3; ++k) {
      j(k, k) = cl[k].value;
      v.col(k) = null_vector(m - cl[k].value * id);
    }
  } else if (cl.size() == 2) {
    const auto& dbl = cl[0].algebraic == 2 ? cl[0] : cl[1];
    const auto& sgl = cl[0].algebraic == 2 ? cl[1] : cl[0];
    const Complex l0 = dbl.value, l1 = sgl.value;
    const Matrix3c n = m - l0 * id;
    j(0, 0) = l0;
    j(1, 1) = l0;
    j(2, 2) = l1;
    v.col(2) = null_vector(m - l1 * id);
    if (dbl.geometric == 2) {
      out.case_tag = JordanCase::II1;
      v.leftCols<2>() = kernel_basis_2d(n);
    } else {
      out.case_tag = JordanCase::II2;
      j(0, 1) = 1.0;
      const Eigen::Matrix<Complex, 3, 2> k = kernel_basis_2d(n * n);
      const Eigen::Matrix<Complex, 3, 2> image = n * k;
      Eigen::JacobiSVD<Eigen::Matrix<Complex, 3, 2>> svd(image, Eigen::ComputeFullV);
      const Vector3c top = normalize_point(k * svd.matrixV().col(0));
      v.col(1) = top;
      v.col(0) = n * top;
    }
  } else {
    const Complex l0 = cl[0].value;
    const Matrix3c n = m - l0 * id;
    j.diagonal().setConstant(l0);
    switch (cl[0].geometric) {
      case 3:
        out.case_tag = JordanCase::III1;
        v = id;
        break;
      case 2: {
        out.case_tag = JordanCase::III2;
        j(0, 1) = 1.0;
        v.col(1) = top_right_singular_vector(n);
        v.col(0) = n * v.col(1);
        const Eigen::Matrix<Complex, 3, 2> k = kernel_basis_2d(n);
        // Pick the kernel column furthest from span{v1}.
        const Vector3c u = v.col(0).normalized();
        double best = -1.0;
        for (int c = 0; c < 2; ++c) {
          const Vector3c rest = k.col(c) - u * u.dot(k.col(c));
          if (rest.norm() > best + 1e-12) {
            best = rest.norm();
            v.col(2) = k.col(c);
          }
        }
        break;
      }
      default:
        out.case_tag = JordanCase::III3;
        j(0, 1) = 1.0;
        j(1, 2) = 1.0;
        v.col(2) = top_right_singular_vector(n * n);
        v.col(1) = n * v.col(2);
        v.col(0) = n * v.col(1);
        break;
    }
  }

  out.conjugator_condition = condition_number(v);
  if (out.conjugator_condition > 1e12)
    throw Error(ErrorKind::IllConditioned,
                "Jordan conjugator condition number " + std::to_string(out.conjugator_condition) + " exceeds 1e12");
  out.P = v.inverse();
  return out;
}

double sin_angle(const Vector3c& a, const Vector3c& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::ZeroVector, "sin_angle of a zero vector");
  const Vector3c x = a / na, y = b / nb;
  const double wedge = std::norm(x(0) * y(1) - x(1) * y(0)) + std::norm(x(0) * y(2) - x(2) * y(0)) +
                       std::norm(x(1) * y(2) - x(2) * y(1));
  return std::min(1.0, std::sqrt(wedge));
}

namespace {

template <typename Derived>
Complex phase_pivot(const Eigen::MatrixBase<Derived>& m) {
  const double max = m.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      if (std::abs(m(i, k)) >= (1.0 - 1e-9) * max) return m(i, k);
  return Complex(1.0);
}

}  // namespace

Vector3c normalize_point(const Vector3c& v) {
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorKind::ZeroVector, "cannot normalize the zero vector");
  Vector3c out = v / n;
  const Complex pivot = phase_pivot(out);
  return out * (std::conj(pivot) / std::abs(pivot));
}

Matrix3c normalize_projective(const Matrix3c& m) {
  const double n = m.norm();
  if (n == 0.0) throw Error(ErrorKind::DegenerateMatrix, "zero matrix is not projective");
  Matrix3c out = m / n;
  // Row-major scan so the pivot rule reads naturally on the printed matrix.
  const Eigen::Matrix<Complex, 3, 3, Eigen::RowMajor> rm = out;
  const Complex pivot = phase_pivot(rm);
  return out * (std::conj(pivot) / std::abs(pivot));
}

ProjMap::ProjMap(const Matrix3c& matrix) : matrix_(matrix) {
  if (!all_finite(matrix)) throw Error(ErrorKind::InvalidArgument, "projective map has non-finite entries");
  if (matrix.norm() == 0.0) throw Error(ErrorKind::DegenerateMatrix, "projective map must be nonzero");
}

ProjMap ProjMap::inverse() const {
  Eigen::FullPivLU<Matrix3c> lu(matrix_);
  if (!lu.isInvertible()) throw Error(ErrorKind::DegenerateMatrix, "projective map is not invertible");
  return ProjMap(lu.inverse());
}

Vector3c ProjMap::apply(const Vector3c& point) const {
  if (point.norm() == 0.0) throw Error(ErrorKind::ZeroVector, "homogeneous point must be nonzero");
  return normalize_point(matrix_ * point);
}

double projective_distance(const ProjMap& a, const ProjMap& b) {
  const Matrix3c x = a.matrix() / a.matrix().norm();
  const Matrix3c y = b.matrix() / b.matrix().norm();
  // Same value as sqrt(2 - 2|tr(x^H y)|) but without the cancellation floor near zero.
  const Complex overlap = (x.adjoint() * y).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (x - y * std::conj(phase)).norm();
}

ProjectiveFit fit_projective(std::span<const Correspondence> corrs) {
  if (corrs.size() < 4)
    throw Error(ErrorKind::DegenerateConfiguration, "at least four correspondences are required");

  const Eigen::Index rows = 2 * static_cast<Eigen::Index>(corrs.size());
  Eigen::Matrix<Complex, Eigen::Dynamic, 9> design = Eigen::Matrix<Complex, Eigen::Dynamic, 9>::Zero(rows, 9);
  Eigen::Index r = 0;
  for (const auto& c : corrs) {
    if (c.source.norm() == 0.0 || c.target.norm() == 0.0)
      throw Error(ErrorKind::ZeroVector, "correspondence with a zero homogeneous vector");
    const Vector3c s = c.source.normalized();
    const Vector3c t = c.target.normalized();
    Eigen::Index k;
    t.cwiseAbs().maxCoeff(&k);
    // t_k (M s)_i - t_i (M s)_k = 0 for the two rows i != k.
    for (Eigen::Index i = 0; i < 3; ++i) {
      if (i == k) continue;
      for (Eigen::Index col = 0; col < 3; ++col) {
        design(r, 3 * i + col) += t(k) * s(col);
        design(r, 3 * k + col) -= t(i) * s(col);
      }
      ++r;
    }
  }

  Eigen::JacobiSVD<Eigen::Matrix<Complex, Eigen::Dynamic, 9>> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  int nullity = 9 - static_cast<int>(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= 1e-10 * top) ++nullity;
  if (nullity > 1) throw Error(ErrorKind::DegenerateConfiguration, "correspondences do not determine a unique map");

  const auto v = svd.matrixV().col(8);
  Matrix3c m;
  for (int i = 0; i < 3; ++i)
    for (int col = 0; col < 3; ++col) m(i, col) = v(3 * i + col);

  ProjectiveFit fit{ProjMap(normalize_projective(m)), 0.0};
  for (const auto& c : corrs) {
    const Vector3c image = fit.map.matrix() * c.source;
    fit.residual = image.norm() == 0.0 ? 1.0 : std::max(fit.residual, sin_angle(image, c.target));
  }
  return fit;
}

}  // namespace riccati
