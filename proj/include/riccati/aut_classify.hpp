#pragma once

#include <string>
#include <vector>

#include "riccati/proj_map.hpp"

namespace riccati {

enum class PaperType { P3, P1R2, P2, Identity, R2, P1 };

const char* to_string(PaperType t);
PaperType paper_type_for(JordanCase c);

struct FixedLocus {
  std::vector<Vector3c> points;  // isolated fixed points, normalized, sorted
  std::vector<Vector3c> lines;   // coefficients l of pointwise-fixed lines {v : l . v = 0}
  bool is_all = false;
};

struct AutClassification {
  JordanCase jordan_case = JordanCase::I;
  PaperType paper_type = PaperType::P3;
  FixedLocus fixed_locus;
  ProjMap normal_form;
  Matrix3c conjugator = Matrix3c::Identity();  // conjugator^-1 * normal_form * conjugator ~ input
  bool near_threshold = false;
};

AutClassification classify(const ProjMap& f, double tol = 1e-8);

FixedLocus fixed_locus(const ProjMap& f, double tol = 1e-8);

/// Points v on the line l . v = 0, spread deterministically; used to check pointwise-fixed lines.
std::vector<Vector3c> sample_line(const Vector3c& line, int count);

}  // namespace riccati
