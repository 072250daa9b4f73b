#include "riccati/normal_form.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "riccati/matrix_core.hpp"

namespace riccati {

namespace {

// Polynomial in x (variable 0) built from the coefficients of one fiber monomial.
MultiPoly coefficient_in_x(const std::map<Exponent, MultiPoly>& split, const Exponent& key,
                           const std::vector<std::string>& vars) {
  const auto it = split.find(key);
  return it == split.end() ? MultiPoly(vars) : it->second;
}

std::optional<Rejection> check_base_component(const PolyVectorField& X) {
  const int base[] = {0};
  if (X.components[0].depends_only_on(base)) return std::nullopt;
  for (const auto& [e, c] : X.components[0].terms())
    if (std::any_of(e.begin() + 1, e.end(), [](int k) { return k != 0; }))
      return Rejection{"P=p(x)", "P≠p(x)", 0, 0, e};
  return std::nullopt;
}

// A monomial of the component attaining the given total fiber degree.
Exponent monomial_of_degree(const MultiPoly& m, std::span<const int> fiber, int degree) {
  for (auto it = m.terms().rbegin(); it != m.terms().rend(); ++it) {
    int s = 0;
    for (int v : fiber) s += it->first[v];
    if (s == degree) return it->first;
  }
  return Exponent(m.arity(), 0);
}

}  // namespace

PolyVectorField RiccatiCnForm::reassemble(const std::vector<std::string>& vars) const {
  std::vector<MultiPoly> comps{p.with_vars(vars)};
  for (size_t j = 0; j < q.size(); ++j) {
    const MultiPoly y = MultiPoly::variable(vars, static_cast<int>(j) + 1);
    comps.push_back(q[j][0].with_vars(vars) * y * y + q[j][1].with_vars(vars) * y + q[j][2].with_vars(vars));
  }
  return make_field("reassembled", std::move(comps));
}

PolyVectorField RiccatiCp2Form::reassemble(const std::vector<std::string>& vars) const {
  const MultiPoly y = MultiPoly::variable(vars, 1), z = MultiPoly::variable(vars, 2);
  auto r = [&](const MultiPoly& m) { return m.with_vars(vars); };
  const MultiPoly Q = r(A) + r(B) * y + r(C) * z + r(D) * y * z + r(E) * y * y;
  const MultiPoly R = r(a) + r(b) * y + r(c) * z + r(E) * y * z + r(D) * z * z;
  return make_field("reassembled", {r(p), Q, R});
}

CheckResult<RiccatiCnForm> check_riccati_cn(const PolyVectorField& X, int n) {
  X.validate();
  if (n < 1 || X.dimension() != static_cast<size_t>(n) + 1)
    throw Error(ErrorKind::ArityMismatch, "field dimension does not match n + 1");
  CheckResult<RiccatiCnForm> out;
  if (auto rej = check_base_component(X)) {
    out.rejection = rej;
    return out;
  }
  for (int j = 1; j <= n; ++j) {
    const MultiPoly& Qj = X.components[j];
    if (Qj.deg_in(j) > 2) {
      const int deg = Qj.deg_in(j);
      Exponent w;
      for (const auto& [e, c] : Qj.terms())
        if (e[j] == deg) w = e;
      out.rejection = Rejection{"deg_{y_n}(Q_n) ≤ 2", "deg_{y_n}(Q_n) > 2", 0, j, w};
      return out;
    }
    for (int i = 1; i <= n; ++i) {
      if (i == j || Qj.deg_in(i) <= 0) continue;
      Exponent w;
      for (const auto& [e, c] : Qj.terms())
        if (e[i] > 0 && w.empty()) w = e;
      out.rejection = Rejection{"deg_{y_i}(Q_j) = 0", "deg_{y_i}(Q_j) > 0", 0, j, w};
      return out;
    }
  }

  const auto& vars = X.vars();
  RiccatiCnForm form{X.components[0], {}};
  for (int j = 1; j <= n; ++j) {
    const int key_var[] = {j};
    const auto split = X.components[j].split_by(key_var);
    form.q.push_back({coefficient_in_x(split, {2}, vars), coefficient_in_x(split, {1}, vars),
                      coefficient_in_x(split, {0}, vars)});
  }
  out.form = std::move(form);
  return out;
}

CheckResult<RiccatiCp2Form> check_riccati_cp2(const PolyVectorField& X) {
  X.validate();
  if (X.dimension() != 3) throw Error(ErrorKind::ArityMismatch, "the ℂP(2) check needs variables (x, y, z)");
  CheckResult<RiccatiCp2Form> out;
  if (auto rej = check_base_component(X)) {
    out.rejection = rej;
    return out;
  }
  const MultiPoly& Q = X.components[1];
  const MultiPoly& R = X.components[2];
  const int fiber[] = {1, 2};
  const int alpha = std::max(0, Q.total_degree_in(fiber));
  const int beta = std::max(0, R.total_degree_in(fiber));

  if (beta > alpha && beta >= 2) {
    out.rejection = Rejection{"β≤α", "β>α", 0, 2, monomial_of_degree(R, fiber, beta)};
    return out;
  }
  if (alpha > 2) {
    out.rejection = Rejection{"α≤2", "α>2", 0, 1, monomial_of_degree(Q, fiber, alpha)};
    return out;
  }

  const auto& vars = X.vars();
  const auto qs = Q.split_by(fiber);
  const auto rs = R.split_by(fiber);
  auto qc = [&](int i, int k) { return coefficient_in_x(qs, {i, k}, vars); };
  auto rc = [&](int i, int k) { return coefficient_in_x(rs, {i, k}, vars); };

  if (alpha == 2) {
    const int possibility = beta <= 0 ? 4 : beta == 1 ? 5 : 6;
    // Each condition compares x-coefficients of one fiber monomial; the witness is that
    // monomial at the lowest x-power where the condition breaks.
    struct Condition {
      const char* constraint;
      const char* violation;
      int component, i, k;
      MultiPoly diff;
    };
    const Condition conditions[] = {
        {"F=0", "F≠0", 1, 0, 2, qc(0, 2)},
        {"e=0", "e≠0", 2, 2, 0, rc(2, 0)},
        {"d=E", "d≠E", 2, 1, 1, rc(1, 1) - qc(2, 0)},
        {"f=D", "f≠D", 2, 0, 2, rc(0, 2) - qc(1, 1)},
    };
    for (const auto& cond : conditions) {
      if (cond.diff.is_zero()) continue;
      Exponent w = cond.diff.terms().begin()->first;
      w[1] = cond.i;
      w[2] = cond.k;
      out.rejection = Rejection{cond.constraint, cond.violation, possibility, cond.component, w};
      return out;
    }
  }

  out.form = RiccatiCp2Form{X.components[0], rc(0, 0), rc(1, 0), rc(0, 1), qc(0, 0), qc(1, 0),
                            qc(0, 1),        qc(1, 1), qc(2, 0)};
  return out;
}

namespace {

// Coefficients of p(x + c) from those of p(x), by repeated synthetic division.
std::vector<Complex> taylor_at(std::span<const Complex> coeffs, Complex c) {
  std::vector<Complex> work(coeffs.begin(), coeffs.end());
  const size_t n = work.size();
  for (size_t k = 0; k + 1 < n; ++k)
    for (size_t i = n - 1; i > k; --i) work[i - 1] += c * work[i];
  return work;
}

std::vector<Complex> raw_roots(std::span<const Complex> monic) {
  const size_t d = monic.size() - 1;
  if (d == 1) return {-monic[0]};
  if (d == 2) {
    const Complex b = monic[1], c = monic[0];
    const Complex sq = std::sqrt(b * b - 4.0 * c);
    const Complex q = std::abs(b + sq) >= std::abs(b - sq) ? -(b + sq) / 2.0 : -(b - sq) / 2.0;
    if (std::abs(q) == 0.0) return {Complex(0.0), Complex(0.0)};
    return {q, c / q};
  }
  if (d == 3) {
    const auto r = cubic_roots(CharPoly{monic[0], monic[1], monic[2]});
    return {r.begin(), r.end()};
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (size_t i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (size_t i = 0; i < d; ++i) companion(i, d - 1) = -monic[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> out(d);
  for (size_t i = 0; i < d; ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

void newton_polish(std::span<const Complex> coeffs, Complex& r) {
  for (int it = 0; it < 8; ++it) {
    const auto t = taylor_at(coeffs, r);
    if (std::abs(t[0]) <= 1e-10 * (1.0 + std::abs(r)) || std::abs(t[1]) == 0.0) return;
    const Complex candidate = r - t[0] / t[1];
    if (!is_finite(candidate) || std::abs(eval_univariate(coeffs, candidate)) >= std::abs(t[0])) return;
    r = candidate;
  }
}

bool is_multiple_root(std::span<const Complex> coeffs, Complex c, int m, double tol) {
  const auto t = taylor_at(coeffs, c);
  const double rho = 1.0 + std::abs(c);
  double norm = 0.0, scale = 1.0;
  std::vector<double> weighted(t.size());
  for (size_t k = 0; k < t.size(); ++k, scale *= rho) {
    weighted[k] = std::abs(t[k]) * scale;
    norm = std::max(norm, weighted[k]);
  }
  for (int k = 0; k < m; ++k)
    if (weighted[k] > tol * norm) return false;
  return true;
}

}  // namespace

std::vector<RootCluster> univariate_roots(std::span<const Complex> coeffs, double cluster_tol) {
  size_t deg = coeffs.size();
  while (deg > 0 && std::abs(coeffs[deg - 1]) < MultiPoly::kDropThreshold) --deg;
  if (deg <= 1) return {};
  const std::span<const Complex> trimmed = coeffs.first(deg);
  std::vector<Complex> monic(trimmed.begin(), trimmed.end());
  for (auto& c : monic) c /= trimmed.back();

  std::vector<Complex> roots = raw_roots(monic);
  for (auto& r : roots) newton_polish(monic, r);

  std::vector<std::vector<Complex>> groups;
  for (const auto& r : roots) groups.push_back({r});
  auto mean = [](const std::vector<Complex>& g) {
    return std::accumulate(g.begin(), g.end(), Complex(0.0)) / double(g.size());
  };
  for (bool merged = true; merged && groups.size() > 1;) {
    merged = false;
    std::vector<std::pair<double, std::pair<size_t, size_t>>> pairs;
    for (size_t i = 0; i < groups.size(); ++i)
      for (size_t j = i + 1; j < groups.size(); ++j) pairs.push_back({std::abs(mean(groups[i]) - mean(groups[j])), {i, j}});
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [dist, ij] : pairs) {
      std::vector<Complex> joined = groups[ij.first];
      joined.insert(joined.end(), groups[ij.second].begin(), groups[ij.second].end());
      if (is_multiple_root(monic, mean(joined), static_cast<int>(joined.size()), cluster_tol)) {
        groups[ij.first] = std::move(joined);
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(ij.second));
        merged = true;
        break;
      }
    }
  }

  std::vector<RootCluster> out;
  for (const auto& g : groups) out.push_back({mean(g), static_cast<int>(g.size())});
  std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

FiberSet invariant_fibers(const MultiPoly& p, const PolyVectorField& X) {
  const int base[] = {0};
  if (!p.depends_only_on(base)) throw Error(ErrorKind::NotRiccati, "base component depends on fiber variables");
  FiberSet out;
  if (p.is_zero()) {
    out.all_invariant = true;
    out.infinity_invariant = true;
    return out;
  }
  const auto coeffs = p.univariate_coefficients(0);
  out.finite_fibers = univariate_roots(coeffs);
  const MultiPoly at_infinity = base_chart(X).field.components[0];
  out.infinity_invariant = at_infinity.is_zero() || at_infinity.min_exponent(0) >= 1;
  return out;
}

FiberSet invariant_fibers(const RiccatiCp2Form& form, const PolyVectorField& X) { return invariant_fibers(form.p, X); }
FiberSet invariant_fibers(const RiccatiCnForm& form, const PolyVectorField& X) { return invariant_fibers(form.p, X); }

const char* to_string(Transversality t) {
  switch (t) {
    case Transversality::Transverse: return "Transverse";
    case Transversality::Tangent: return "Tangent";
    case Transversality::Singular: return "Singular";
  }
  return "?";
}

const char* to_string(CorollaryStatus s) {
  switch (s) {
    case CorollaryStatus::ImplicationVerified: return "implication_verified";
    case CorollaryStatus::NoTransverseFiber: return "no_transverse_fiber";
    case CorollaryStatus::Counterexample: return "COUNTEREXAMPLE";
  }
  return "?";
}

std::vector<PolyVectorField> fiber_charts(const PolyVectorField& X, FiberKind kind) {
  X.validate();
  std::vector<PolyVectorField> charts;
  if (kind == FiberKind::CP2) {
    if (X.dimension() != 3) throw Error(ErrorKind::ArityMismatch, "ℂP(2) fibers need variables (x, y, z)");
    charts.push_back(X);
    charts.push_back(fiber_chart_cp2(X).field);
    charts.push_back(fiber_chart_cp2_second(X).field);
    return charts;
  }
  const int n = static_cast<int>(X.dimension()) - 1;
  for (int mask = 0; mask < (1 << n); ++mask) {
    PolyVectorField f = X;
    for (int k = 1; k <= n; ++k)
      if (mask & (1 << (k - 1))) f = polydisk_chart_cn(f, k).field;
    if (mask == 0) f.chart = X.chart;
    charts.push_back(std::move(f));
  }
  return charts;
}

namespace {

double abs_eval(const MultiPoly& m, std::span<const Complex> point) {
  double s = 0.0;
  for (const auto& [e, c] : m.terms()) {
    double t = std::abs(c);
    for (size_t i = 0; i < e.size(); ++i) t *= std::pow(std::abs(point[i]), e[i]);
    s += t;
  }
  return s;
}

// A zero of a nonconstant polynomial in the fiber variables (x already fixed).
std::vector<Complex> zero_of(const MultiPoly& b, Complex x0) {
  const size_t n = b.arity();
  const Complex generic[] = {0.0, Complex(0.37, 0.21), Complex(-0.53, 0.44), Complex(0.71, -0.29)};
  for (const Complex g : generic)
    for (size_t v = 1; v < n; ++v) {
      if (b.deg_in(static_cast<int>(v)) <= 0) continue;
      MultiPoly s = b;
      for (size_t o = 1; o < n; ++o)
        if (o != v) s = s.partial_eval(static_cast<int>(o), g);
      if (s.deg_in(static_cast<int>(v)) <= 0) continue;
      const auto roots = univariate_roots(s.univariate_coefficients(static_cast<int>(v)));
      if (roots.empty()) continue;
      std::vector<Complex> point(n, g);
      point[0] = x0;
      point[v] = roots.front().value;
      return point;
    }
  std::vector<Complex> point(n, 0.0);
  point[0] = x0;
  return point;
}

}  // namespace

TransversalityVerdict transversality_at(const PolyVectorField& X, Complex x0, FiberKind kind,
                                        std::span<const int> chart_order) {
  const auto charts = fiber_charts(X, kind);
  std::vector<int> order(chart_order.begin(), chart_order.end());
  if (order.empty()) {
    order.resize(charts.size());
    std::iota(order.begin(), order.end(), 0);
  }
  if (order.size() != charts.size()) throw Error(ErrorKind::InvalidArgument, "chart order must list every chart");

  for (int idx : order) {
    const PolyVectorField& f = charts.at(idx);
    const MultiPoly b = f.components[0].partial_eval(0, x0);
    const bool constant = b.depends_only_on(std::span<const int>{});
    if (constant && !b.is_zero()) continue;

    std::vector<Complex> point;
    if (b.is_zero()) {
      point.assign(f.dimension(), 0.0);
      point[0] = x0;
    } else {
      point = zero_of(b, x0);
    }
    bool all_vanish = true;
    for (const auto& comp : f.components) {
      const double scale = abs_eval(comp, point);
      if (std::abs(comp.eval(point)) > 1e-9 * std::max(1.0, scale)) all_vanish = false;
    }
    return {all_vanish ? Transversality::Singular : Transversality::Tangent, f.chart, point};
  }
  return {Transversality::Transverse, "", {}};
}

CorollaryReport corollary_check(const PolyVectorField& X, FiberKind kind, std::uint64_t seed) {
  X.validate();
  CorollaryReport report;

  MultiPoly base = X.components[0];
  for (size_t v = 1; v < X.dimension(); ++v) base = base.partial_eval(static_cast<int>(v), 0.0);
  double max_root = 0.0;
  if (!base.is_zero())
    for (const auto& r : univariate_roots(base.univariate_coefficients(0))) max_root = std::max(max_root, std::abs(r.value));
  report.sample_radius = 1.0 + max_root;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  constexpr int kSamples = 32;
  for (int i = 0; i < kSamples; ++i) {
    const Complex x0 = std::polar(report.sample_radius, angle(rng));
    ++report.samples;
    if (transversality_at(X, x0, kind).kind == Transversality::Transverse) {
      report.transverse_x = x0;
      break;
    }
  }
  if (!report.transverse_x) {
    report.status = CorollaryStatus::NoTransverseFiber;
    return report;
  }
  if (kind == FiberKind::CP2) {
    const auto check = check_riccati_cp2(X);
    report.rejection = check.rejection;
  } else {
    const auto check = check_riccati_cn(X, static_cast<int>(X.dimension()) - 1);
    report.rejection = check.rejection;
  }
  report.status = report.rejection ? CorollaryStatus::Counterexample : CorollaryStatus::ImplicationVerified;
  return report;
}

}  // namespace riccati
