#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riccati/poly.hpp"

namespace riccati {

/// First violated condition of a normal-form check.
struct Rejection {
  std::string constraint;  // condition that must hold, e.g. "F=0"
  std::string violation;   // what was found instead, e.g. "F≠0"
  int possibility = 0;     // 4, 5 or 6 when the quadratic case of the ℂP(2) check fails
  int component = 0;       // index of the offending component
  Exponent witness_monomial;
};

struct RiccatiCnForm {
  MultiPoly p;
  std::vector<std::array<MultiPoly, 3>> q;  // (q_{j,2}, q_{j,1}, q_{j,0}) for j = 1..n, polynomials in x

  PolyVectorField reassemble(const std::vector<std::string>& vars) const;
};

/// Q = A + B y + C z + D yz + E y^2, R = a + b y + c z + E yz + D z^2.
struct RiccatiCp2Form {
  MultiPoly p, a, b, c, A, B, C, D, E;

  PolyVectorField reassemble(const std::vector<std::string>& vars) const;
};

template <typename Form>
struct CheckResult {
  std::optional<Form> form;
  std::optional<Rejection> rejection;
  bool accepted() const { return form.has_value(); }
};

CheckResult<RiccatiCnForm> check_riccati_cn(const PolyVectorField& X, int n);
CheckResult<RiccatiCp2Form> check_riccati_cp2(const PolyVectorField& X);

struct RootCluster {
  Complex value;
  int multiplicity = 1;
};

/// Roots of c_0 + c_1 x + ... with multiple roots merged.
std::vector<RootCluster> univariate_roots(std::span<const Complex> coeffs, double cluster_tol = 1e-7);

struct FiberSet {
  std::vector<RootCluster> finite_fibers;
  bool infinity_invariant = false;
  bool all_invariant = false;  // p vanishes identically
};

FiberSet invariant_fibers(const MultiPoly& p, const PolyVectorField& X);
FiberSet invariant_fibers(const RiccatiCp2Form& form, const PolyVectorField& X);
FiberSet invariant_fibers(const RiccatiCnForm& form, const PolyVectorField& X);

enum class FiberKind { CP2, Polydisk };

enum class Transversality { Transverse, Tangent, Singular };
const char* to_string(Transversality t);

struct TransversalityVerdict {
  Transversality kind = Transversality::Transverse;
  std::string chart;             // chart holding the witness
  std::vector<Complex> witness;  // point in that chart's coordinates, base first
};

/// The affine fiber charts examined by transversality_at, in their default order.
std::vector<PolyVectorField> fiber_charts(const PolyVectorField& X, FiberKind kind);

TransversalityVerdict transversality_at(const PolyVectorField& X, Complex x0, FiberKind kind,
                                        std::span<const int> chart_order = {});

enum class CorollaryStatus { ImplicationVerified, NoTransverseFiber, Counterexample };
const char* to_string(CorollaryStatus s);

struct CorollaryReport {
  CorollaryStatus status = CorollaryStatus::NoTransverseFiber;
  std::optional<Complex> transverse_x;
  int samples = 0;
  double sample_radius = 1.0;
  std::optional<Rejection> rejection;
};

CorollaryReport corollary_check(const PolyVectorField& X, FiberKind kind, std::uint64_t seed = 0);

}  // namespace riccati
