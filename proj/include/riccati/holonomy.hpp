#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riccati/aut_classify.hpp"
#include "riccati/normal_form.hpp"
#include "riccati/poly.hpp"
#include "riccati/proj_map.hpp"

namespace riccati {

// ---------------------------------------------------------------------------------------------
// Local models

enum class ModelCase { A, B, C, D, E };
const char* to_string(ModelCase c);
ModelCase model_case_from_string(const std::string& s);

/// One of the five local fields around a center x_j, in fiber coordinates (u, v).
///   C: alpha1 u du + alpha2 v dv          D: alpha2 (u du + v dv)
///   E: nu/(2 pi i) v du                   B: (lambda u + nu/(2 pi i mu) v) du + lambda v dv
///   A: (mu/(2 pi i) v - mu^2/(4 pi i)) du + mu/(2 pi i) dv
/// each over (x - center) dx.
struct LocalModel {
  ModelCase case_tag = ModelCase::C;
  Complex center = 0.0;
  Complex alpha1 = 0.0, alpha2 = 0.0;  // C uses both, D uses alpha2
  Complex lambda = 0.0;                // B, with exp(2 pi i lambda) = mu
  Complex nu = 0.0;                    // B, E
  Complex mu = 1.0;                    // A, B

  static LocalModel case_c(Complex center, Complex alpha1, Complex alpha2);
  static LocalModel case_d(Complex center, Complex alpha2);
  static LocalModel case_e(Complex center, Complex nu);
  static LocalModel case_b(Complex center, Complex mu, Complex nu, int winding = 0);
  static LocalModel case_a(Complex center, Complex mu);

  void validate() const;
};

/// Affine map (u, v) -> linear (u, v) + translation.
class AffineFiberMap {
 public:
  AffineFiberMap();
  AffineFiberMap(const Matrix2c& linear, const Vector2c& translation);

  const Matrix2c& linear() const { return linear_; }
  const Vector2c& translation() const { return translation_; }
  Vector2c apply(const Vector2c& p) const { return linear_ * p + translation_; }
  AffineFiberMap compose(const AffineFiberMap& inner) const;
  AffineFiberMap inverse() const;
  /// [[L, t], [0, 1]] acting on (u, v, 1).
  Matrix3c embed() const;

 private:
  Matrix2c linear_;
  Vector2c translation_;
};

PolyVectorField local_model_field(const LocalModel& m);

/// Monodromy of the local model once around its center counterclockwise.
AffineFiberMap analytic_holonomy(const LocalModel& m);

/// Fiber identification (U, V) -> (u, v) at x, with L = Log((x - center)/(anchor - center)) and
/// anchor = center + r/2. Leaves of the model are exactly the level sets of its inverse.
AffineFiberMap gluing_map(const LocalModel& m, Complex x, double r);
/// Inverse of gluing_map: (u, v) -> (U, V).
AffineFiberMap gluing_pullback(const LocalModel& m, Complex x, double r);

/// Local model whose holonomy is the Jordan normal form J (as produced by jordan_form).
LocalModel model_for_normal_form(const Matrix3c& J, JordanCase c, Complex center);

// ---------------------------------------------------------------------------------------------
// Paths

struct PathSegment {
  enum class Kind { Line, Arc };
  Kind kind = Kind::Line;
  Complex from = 0.0, to = 0.0;              // line
  Complex center = 0.0;                      // arc
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;  // arc, theta1 < theta0 runs clockwise

  static PathSegment line(Complex from, Complex to);
  static PathSegment arc(Complex center, double radius, double theta0, double theta1);

  Complex position(double s) const;    // s in [0, 1]
  Complex derivative(double s) const;  // d position / ds
  Complex start() const { return position(0.0); }
  Complex end() const { return position(1.0); }
  PathSegment reversed() const;
  double distance_to(Complex point) const;
};

struct LoopPath {
  Complex base_point = 0.0;
  std::vector<PathSegment> segments;

  static LoopPath circle(Complex center, double radius, double theta0 = 0.0);
  LoopPath reversed() const;
  LoopPath concatenated(const LoopPath& next) const;
  bool is_closed(double tol = 1e-12) const;
  double distance_to(Complex point) const;
};

// ---------------------------------------------------------------------------------------------
// Numerical lifting

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long chart_switches = 0;
};

struct LiftOptions {
  double tol = 1e-9;
  long max_steps = 1000000;
  double switch_threshold = 2.0;
  double min_clearance = 1e-8;  // distance from the path to any invariant fiber
  int n_samples = 8;
  std::uint64_t seed = 0;
};

struct HolonomyResult {
  ProjMap map;
  double residual = 0.0;
  int n_samples = 0;
  IntegratorStats stats;
  std::vector<Vector3c> starts, ends;  // homogeneous (y : z : 1) coordinates
};

/// Point of the fiber in homogeneous coordinates h = (y, z, 1) carried along the path; the
/// state at the end of every segment is returned (first entry is the start).
std::vector<Vector3c> lift_path(const PolyVectorField& X, const std::vector<PathSegment>& path, const Vector3c& h0,
                                const LiftOptions& options, IntegratorStats* stats = nullptr);

/// Deterministic fiber sample points followed by seeded random ones.
std::vector<Vector3c> fiber_samples(int n, std::uint64_t seed);

HolonomyResult numeric_holonomy(const PolyVectorField& X, const LoopPath& loop, const LiftOptions& options = {});

struct GeneratorResult {
  bool at_infinity = false;
  Complex fiber = 0.0;
  LoopPath loop;
  HolonomyResult holonomy;
};

struct GeneratorOptions {
  LiftOptions lift;
  std::optional<double> clearance;  // automatic when unset
};

/// Generators around every invariant fiber in counterclockwise spoke order seen from the base
/// point, followed by the loop around infinity when that fiber is invariant. The holonomies
/// satisfy H_inf * H_k * ... * H_1 = identity.
std::vector<GeneratorResult> holonomy_generators(const PolyVectorField& X, Complex base_point,
                                                 const GeneratorOptions& options = {});

/// Projective distance of H_last * ... * H_first from the identity.
double product_relation_defect(const std::vector<GeneratorResult>& generators);

// ---------------------------------------------------------------------------------------------
// Synthesis

struct SynthesisOptions {
  LiftOptions lift;
  double tol_eigen = 1e-8;
  double radius = 1.0;  // circle used for the numeric cross-check
  bool numeric_check = true;
};

struct GeneratorCheck {
  int index = 0;  // 0 is f_0 = (f_1 ... f_k)^-1
  ProjMap input;
  AutClassification classification;
  LocalModel model;
  AffineFiberMap analytic;
  double analytic_vs_normal_form = 0.0;
  double numeric_vs_analytic = 0.0;
  double numeric_residual = 0.0;
  double reconstruction = 0.0;  // conjugator^-1 * analytic * conjugator vs input
  bool passed = false;
};

struct SynthesisReport {
  std::vector<GeneratorCheck> generators;
  double product_defect = 0.0;  // f_0 f_1 ... f_k vs identity
  double reconstructed_product_defect = 0.0;
  bool passed = false;
};

SynthesisReport verify_synthesis(const std::vector<ProjMap>& generators, const SynthesisOptions& options = {});

}  // namespace riccati
