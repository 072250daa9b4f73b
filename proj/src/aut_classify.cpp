#include "riccati/aut_classify.hpp"

#include <algorithm>

namespace riccati {

const char* to_string(PaperType t) {
  switch (t) {
    case PaperType::P3: return "P3";
    case PaperType::P1R2: return "P1R2";
    case PaperType::P2: return "P2";
    case PaperType::Identity: return "Identity";
    case PaperType::R2: return "R2";
    case PaperType::P1: return "P1";
  }
  return "?";
}

PaperType paper_type_for(JordanCase c) {
  switch (c) {
    case JordanCase::I: return PaperType::P3;
    case JordanCase::II1: return PaperType::P1R2;
    case JordanCase::II2: return PaperType::P2;
    case JordanCase::III1: return PaperType::Identity;
    case JordanCase::III2: return PaperType::R2;
    case JordanCase::III3: return PaperType::P1;
  }
  return PaperType::P3;
}

namespace {

Vector3c cross(const Vector3c& a, const Vector3c& b) {
  return Vector3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

bool lex_less(const Vector3c& a, const Vector3c& b) {
  constexpr double eps = 1e-9;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(a(i).real() - b(i).real()) > eps) return a(i).real() < b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > eps) return a(i).imag() < b(i).imag();
  }
  return false;
}

FixedLocus locus_from(const Matrix3c& m, const EigenData& eigen) {
  FixedLocus locus;
  for (const auto& c : eigen.clusters) {
    const Matrix3c shifted = m - c.value * Matrix3c::Identity();
    Eigen::JacobiSVD<Matrix3c> svd(shifted, Eigen::ComputeFullV);
    switch (c.geometric) {
      case 1:
        locus.points.push_back(normalize_point(svd.matrixV().col(2)));
        break;
      case 2:
        locus.lines.push_back(normalize_point(cross(svd.matrixV().col(1), svd.matrixV().col(2))));
        break;
      default:
        locus.is_all = true;
        break;
    }
  }
  std::sort(locus.points.begin(), locus.points.end(), lex_less);
  std::sort(locus.lines.begin(), locus.lines.end(), lex_less);
  return locus;
}

}  // namespace

FixedLocus fixed_locus(const ProjMap& f, double tol) {
  return locus_from(f.matrix(), eigen_structure(f.matrix(), tol));
}

AutClassification classify(const ProjMap& f, double tol) {
  const JordanDecomposition jd = jordan_form(f.matrix(), tol);
  AutClassification out;
  out.jordan_case = jd.case_tag;
  out.paper_type = paper_type_for(jd.case_tag);
  out.fixed_locus = locus_from(f.matrix(), jd.eigen);
  out.normal_form = ProjMap(jd.J);
  out.conjugator = jd.P;
  out.near_threshold = jd.eigen.near_threshold;
  return out;
}

std::vector<Vector3c> sample_line(const Vector3c& line, int count) {
  std::array<Vector3c, 3> candidates;
  for (int i = 0; i < 3; ++i) candidates[i] = cross(line, Vector3c::Unit(i));
  std::sort(candidates.begin(), candidates.end(),
            [](const Vector3c& a, const Vector3c& b) { return a.norm() > b.norm(); });
  const Vector3c b1 = candidates[0].normalized();
  Vector3c b2 = Vector3c::Zero();
  for (int i = 1; i < 3; ++i) {
    const Vector3c rest = candidates[i] - b1 * b1.dot(candidates[i]);
    if (rest.norm() > b2.norm()) b2 = rest;
  }
  b2.normalize();

  std::vector<Vector3c> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double t = (k + 0.5) / count;
    const Complex weight = std::polar(std::tan(0.5 * kPi * t), 2.0 * kPi * 0.618034 * k);
    out.push_back(normalize_point(b1 + weight * b2));
  }
  return out;
}

}  // namespace riccati
