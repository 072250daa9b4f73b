#include "riccati/poly.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace riccati {

MultiPoly::MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

MultiPoly MultiPoly::constant(std::vector<std::string> vars, Complex c) {
  const size_t n = vars.size();
  return monomial(std::move(vars), Exponent(n, 0), c);
}

MultiPoly MultiPoly::variable(std::vector<std::string> vars, int index) {
  if (index < 0 || index >= static_cast<int>(vars.size()))
    throw Error(ErrorKind::ArityMismatch, "variable index out of range");
  Exponent e(vars.size(), 0);
  e[index] = 1;
  return monomial(std::move(vars), std::move(e));
}

MultiPoly MultiPoly::monomial(std::vector<std::string> vars, Exponent exp, Complex c) {
  if (exp.size() != vars.size()) throw Error(ErrorKind::ArityMismatch, "exponent length differs from arity");
  MultiPoly p(std::move(vars));
  p.add_term(exp, c);
  return p;
}

void MultiPoly::add_term(const Exponent& exp, Complex c) {
  if (exp.size() != arity()) throw Error(ErrorKind::ArityMismatch, "exponent length differs from arity");
  auto [it, inserted] = terms_.try_emplace(exp, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kDropThreshold) terms_.erase(it);
}

Complex MultiPoly::coefficient(const Exponent& exp) const {
  const auto it = terms_.find(exp);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void MultiPoly::check_same_vars(const MultiPoly& o) const {
  if (vars_ != o.vars_) throw Error(ErrorKind::ArityMismatch, "polynomials have different variable lists");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(Complex c) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (std::abs(it->second) < kDropThreshold)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.check_same_vars(b);
  MultiPoly out(a.vars_);
  Exponent e(a.arity());
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

MultiPoly MultiPoly::pow(int k) const {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative power of a polynomial");
  MultiPoly result = constant(vars_, 1.0);
  MultiPoly base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

namespace {

Complex int_pow(Complex z, int k) {
  if (k < 0) return 1.0 / int_pow(z, -k);
  Complex r = 1.0;
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

}  // namespace

Complex MultiPoly::eval(std::span<const Complex> point) const {
  if (point.size() != arity()) throw Error(ErrorKind::ArityMismatch, "evaluation point has wrong length");
  Complex sum = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex term = c;
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0) term *= int_pow(point[i], e[i]);
    sum += term;
  }
  return sum;
}

int MultiPoly::deg_in(int var) const {
  if (var < 0 || var >= static_cast<int>(arity())) throw Error(ErrorKind::ArityMismatch, "variable index out of range");
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

int MultiPoly::total_degree_in(std::span<const int> vars) const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : vars) s += e.at(v);
    d = std::max(d, s);
  }
  return d;
}

int MultiPoly::min_exponent(int var) const {
  if (terms_.empty()) return 0;
  int m = std::numeric_limits<int>::max();
  for (const auto& [e, c] : terms_) m = std::min(m, e.at(var));
  return m;
}

bool MultiPoly::is_polynomial() const {
  for (const auto& [e, c] : terms_)
    for (int k : e)
      if (k < 0) return false;
  return true;
}

bool MultiPoly::depends_only_on(std::span<const int> vars) const {
  for (const auto& [e, c] : terms_)
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0 && std::find(vars.begin(), vars.end(), static_cast<int>(i)) == vars.end()) return false;
  return true;
}

MultiPoly MultiPoly::partial_eval(int var, Complex value) const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_) {
    Exponent f = e;
    f.at(var) = 0;
    out.add_term(f, c * int_pow(value, e[var]));
  }
  return out;
}

MultiPoly MultiPoly::shifted(int var, int k) const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_) {
    Exponent f = e;
    f.at(var) += k;
    out.terms_.emplace(std::move(f), c);
  }
  return out;
}

std::vector<Complex> MultiPoly::univariate_coefficients(int var) const {
  const int only[] = {var};
  if (!depends_only_on(only)) throw Error(ErrorKind::InvalidArgument, "polynomial is not univariate in the variable");
  if (!is_polynomial()) throw Error(ErrorKind::InvalidArgument, "negative exponent in univariate polynomial");
  std::vector<Complex> out(std::max(0, deg_in(var)) + 1, Complex(0.0));
  for (const auto& [e, c] : terms_) out[e[var]] = c;
  return out;
}

std::map<Exponent, MultiPoly> MultiPoly::split_by(std::span<const int> vars) const {
  std::map<Exponent, MultiPoly> out;
  for (const auto& [e, c] : terms_) {
    Exponent key;
    Exponent rest = e;
    for (int v : vars) {
      key.push_back(e.at(v));
      rest[v] = 0;
    }
    auto it = out.try_emplace(std::move(key), MultiPoly(vars_)).first;
    it->second.add_term(rest, c);
  }
  return out;
}

MultiPoly MultiPoly::with_vars(std::vector<std::string> vars) const {
  if (vars.size() != arity()) throw Error(ErrorKind::ArityMismatch, "renaming must keep the arity");
  MultiPoly out(std::move(vars));
  out.terms_ = terms_;
  return out;
}

MultiPoly MultiPoly::normalized() const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) >= kDropThreshold) out.terms_.emplace(e, c);
  return out;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[96];
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (c.imag() == 0.0)
      std::snprintf(buf, sizeof buf, "%.17g", c.real());
    else
      std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)", c.real(), c.imag());
    if (!out.empty()) out += " + ";
    out += buf;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      out += "*" + vars_[i];
      if (e[i] != 1) out += "^" + std::to_string(e[i]);
    }
  }
  return out;
}

MultiPoly substitute_monomials(const MultiPoly& p, const std::vector<Exponent>& images,
                               const std::vector<std::string>& new_vars) {
  if (images.size() != p.arity()) throw Error(ErrorKind::ArityMismatch, "one image per variable is required");
  MultiPoly out(new_vars);
  Exponent f(new_vars.size());
  for (const auto& [e, c] : p.terms()) {
    std::fill(f.begin(), f.end(), 0);
    for (size_t i = 0; i < e.size(); ++i)
      for (size_t j = 0; j < f.size(); ++j) f[j] += e[i] * images[i].at(j);
    out.add_term(f, c);
  }
  return out;
}

Complex eval_univariate(std::span<const Complex> coeffs, Complex x) {
  Complex r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
  return r;
}

VectorXc PolyVectorField::eval(std::span<const Complex> point) const {
  VectorXc out(components.size());
  for (size_t i = 0; i < components.size(); ++i) out(i) = components[i].eval(point);
  return out;
}

void PolyVectorField::validate() const {
  if (components.empty()) throw Error(ErrorKind::ArityMismatch, "vector field has no components");
  for (const auto& c : components)
    if (c.vars() != components.front().vars() || c.arity() != components.size())
      throw Error(ErrorKind::ArityMismatch, "components must share one variable list matching the dimension");
}

PolyVectorField make_field(std::string chart, std::vector<MultiPoly> components) {
  PolyVectorField f{std::move(chart), std::move(components)};
  f.validate();
  return f;
}

namespace {

Exponent unit(size_t n, int i, int k = 1) {
  Exponent e(n, 0);
  e[i] = k;
  return e;
}

ChartChangeResult clear_poles(std::string chart, std::vector<MultiPoly> comps, int var) {
  int k = 0;
  for (const auto& c : comps) k = std::max(k, -c.min_exponent(var));
  for (auto& c : comps) c = c.shifted(var, k);
  ChartChangeResult out{make_field(std::move(chart), std::move(comps)), k};
  for (const auto& c : out.field.components)
    if (!c.is_polynomial()) throw Error(ErrorKind::InvalidArgument, "chart change left a pole in another variable");
  return out;
}

void require_dimension(const PolyVectorField& X, size_t n) {
  X.validate();
  if (X.dimension() != n) throw Error(ErrorKind::ArityMismatch, "field has the wrong number of variables");
}

}  // namespace

ChartChangeResult fiber_chart_cp2(const PolyVectorField& X) {
  require_dimension(X, 3);
  const std::vector<std::string> vars{X.vars()[0], "u", "v"};
  const std::vector<Exponent> images{{1, 0, 0}, {0, -1, 0}, {0, -1, 1}};
  const MultiPoly P = substitute_monomials(X.components[0], images, vars);
  const MultiPoly Q = substitute_monomials(X.components[1], images, vars);
  const MultiPoly R = substitute_monomials(X.components[2], images, vars);
  const MultiPoly u = MultiPoly::variable(vars, 1);
  const MultiPoly v = MultiPoly::variable(vars, 2);
  return clear_poles("cp2_uv", {P, -(u * u * Q), u * R - u * v * Q}, 1);
}

ChartChangeResult fiber_chart_cp2_second(const PolyVectorField& X) {
  require_dimension(X, 3);
  const std::vector<std::string> vars{X.vars()[0], "t", "s"};
  const std::vector<Exponent> images{{1, 0, 0}, {0, 1, -1}, {0, 0, -1}};
  const MultiPoly P = substitute_monomials(X.components[0], images, vars);
  const MultiPoly Q = substitute_monomials(X.components[1], images, vars);
  const MultiPoly R = substitute_monomials(X.components[2], images, vars);
  const MultiPoly t = MultiPoly::variable(vars, 1);
  const MultiPoly s = MultiPoly::variable(vars, 2);
  return clear_poles("cp2_ts", {P, s * Q - t * s * R, -(s * s * R)}, 2);
}

ChartChangeResult polydisk_chart_cn(const PolyVectorField& X, int k) {
  X.validate();
  const int n = static_cast<int>(X.dimension()) - 1;
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, "polydisk chart index out of range");
  std::vector<std::string> vars = X.vars();
  vars[k] = "w" + std::to_string(k);
  std::vector<Exponent> images;
  for (int i = 0; i <= n; ++i) images.push_back(unit(n + 1, i, i == k ? -1 : 1));
  std::vector<MultiPoly> comps;
  for (const auto& c : X.components) comps.push_back(substitute_monomials(c, images, vars));
  const MultiPoly w = MultiPoly::variable(vars, k);
  comps[k] = -(w * w * comps[k]);
  return clear_poles("polydisk_w" + std::to_string(k), std::move(comps), k);
}

ChartChangeResult base_chart(const PolyVectorField& X) {
  X.validate();
  const size_t n = X.dimension();
  std::vector<std::string> vars = X.vars();
  vars[0] = "w";
  std::vector<Exponent> images;
  for (size_t i = 0; i < n; ++i) images.push_back(unit(n, static_cast<int>(i), i == 0 ? -1 : 1));
  std::vector<MultiPoly> comps;
  for (const auto& c : X.components) comps.push_back(substitute_monomials(c, images, vars));
  const MultiPoly w = MultiPoly::variable(vars, 0);
  comps[0] = -(w * w * comps[0]);
  return clear_poles("base_w", std::move(comps), 0);
}

}  // namespace riccati
