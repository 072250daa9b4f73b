#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "riccati/types.hpp"

namespace riccati {

using Exponent = std::vector<int>;

/// Sparse polynomial over C in positionally ordered variables. Exponents may go negative while
/// a chart change is in flight; every public chart operation returns polynomials again.
class MultiPoly {
 public:
  static constexpr double kDropThreshold = 1e-14;

  MultiPoly() = default;
  explicit MultiPoly(std::vector<std::string> vars);

  static MultiPoly constant(std::vector<std::string> vars, Complex c);
  static MultiPoly variable(std::vector<std::string> vars, int index);
  static MultiPoly monomial(std::vector<std::string> vars, Exponent exp, Complex c = 1.0);

  const std::vector<std::string>& vars() const { return vars_; }
  size_t arity() const { return vars_.size(); }
  const std::map<Exponent, Complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Accumulates c into the monomial exp; the sum is dropped if it falls under the threshold.
  void add_term(const Exponent& exp, Complex c);
  Complex coefficient(const Exponent& exp) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(Complex c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, Complex c) { return a *= c; }
  friend MultiPoly operator*(Complex c, MultiPoly a) { return a *= c; }
  MultiPoly operator-() const { return *this * Complex(-1.0); }
  MultiPoly pow(int k) const;

  Complex eval(std::span<const Complex> point) const;
  /// Degree in one variable; -1 for the zero polynomial.
  int deg_in(int var) const;
  /// Total degree in a subset of variables; -1 for the zero polynomial.
  int total_degree_in(std::span<const int> vars) const;
  /// Smallest exponent of var over all terms; 0 for the zero polynomial.
  int min_exponent(int var) const;
  bool is_polynomial() const;
  /// True iff only the listed variables appear with nonzero exponent.
  bool depends_only_on(std::span<const int> vars) const;

  /// Fixes var to a value; the variable stays in the list with exponent zero everywhere.
  MultiPoly partial_eval(int var, Complex value) const;
  /// Multiplies by var^k (k may be negative).
  MultiPoly shifted(int var, int k) const;
  /// Coefficients c_0..c_d of a polynomial that depends only on var.
  std::vector<Complex> univariate_coefficients(int var) const;
  /// Groups terms by the exponents of the listed variables; keys are those sub-exponents,
  /// values are the complementary polynomials (with the listed variables zeroed out).
  std::map<Exponent, MultiPoly> split_by(std::span<const int> vars) const;
  MultiPoly with_vars(std::vector<std::string> vars) const;

  /// Drops coefficients under the threshold.
  MultiPoly normalized() const;
  std::string to_string() const;

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  void check_same_vars(const MultiPoly& o) const;
  std::vector<std::string> vars_;
  std::map<Exponent, Complex> terms_;
};

/// Substitutes each old variable i by the Laurent monomial new_vars^images[i].
MultiPoly substitute_monomials(const MultiPoly& p, const std::vector<Exponent>& images,
                               const std::vector<std::string>& new_vars);

/// Univariate helpers used for p(x).
Complex eval_univariate(std::span<const Complex> coeffs, Complex x);

struct PolyVectorField {
  std::string chart;
  std::vector<MultiPoly> components;  // one per variable, base first

  const std::vector<std::string>& vars() const { return components.front().vars(); }
  size_t dimension() const { return components.size(); }
  VectorXc eval(std::span<const Complex> point) const;
  void validate() const;
};

struct ChartChangeResult {
  PolyVectorField field;
  int clearing_exponent = 0;
};

/// Builds a field from components, checking shared variable lists.
PolyVectorField make_field(std::string chart, std::vector<MultiPoly> components);

/// (x,y,z) -> (x,u,v) with u = 1/y, v = z/y.
ChartChangeResult fiber_chart_cp2(const PolyVectorField& X);
/// (x,y,z) -> (x,t,s) with t = y/z, s = 1/z.
ChartChangeResult fiber_chart_cp2_second(const PolyVectorField& X);
/// (x,y_1..y_n) -> same with y_k replaced by w_k = 1/y_k; k is 1-based.
ChartChangeResult polydisk_chart_cn(const PolyVectorField& X, int k);
/// x -> w = 1/x.
ChartChangeResult base_chart(const PolyVectorField& X);

}  // namespace riccati
