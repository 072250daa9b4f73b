#include <doctest.h>

#include <algorithm>

#include "riccati/normal_form.hpp"
#include "test_support.hpp"

using namespace riccati;
using namespace riccati::testing;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

MultiPoly var(int i) { return MultiPoly::variable(kXYZ, i); }
MultiPoly cst(Complex c) { return MultiPoly::constant(kXYZ, c); }
MultiPoly in_x(std::initializer_list<Complex> c) { return univariate(kXYZ, 0, c); }

PolyVectorField xyz(MultiPoly p, MultiPoly q, MultiPoly r) { return make_field("xyz", {p, q, r}); }

PolyVectorField okamoto(Complex a0, Complex b0) {
  const MultiPoly y = var(1), z = var(2);
  return xyz(cst(1), z - y * y, -(cst(a0) + cst(b0) * y + y * z));
}

MultiPoly random_in_x(std::mt19937_64& rng, int degree) {
  MultiPoly m(kXYZ);
  for (int k = 0; k <= degree; ++k) m.add_term({k, 0, 0}, random_complex(rng));
  return m;
}

// Random field of the normal shape, p with the given roots.
PolyVectorField random_normal_field(std::mt19937_64& rng, const std::vector<Complex>& roots) {
  MultiPoly p = cst(random_nonzero(rng));
  for (Complex r : roots) p = p * (var(0) - cst(r));
  const MultiPoly y = var(1), z = var(2);
  auto c = [&] { return random_in_x(rng, 2); };
  const MultiPoly A = c(), B = c(), C = c(), D = c(), E = c(), a = c(), b = c(), cc = c();
  return xyz(p, A + B * y + C * z + D * y * z + E * y * y, a + b * y + cc * z + E * y * z + D * z * z);
}

bool equal_fields(const PolyVectorField& a, const PolyVectorField& b) {
  if (a.dimension() != b.dimension()) return false;
  for (size_t i = 0; i < a.dimension(); ++i)
    if (!(a.components[i] - b.components[i].with_vars(a.vars())).is_zero()) return false;
  return true;
}

}  // namespace

TEST_CASE("Theorem-2 checker examples") {
  const std::vector<std::string> xy{"x", "y1"};
  const MultiPoly x = MultiPoly::variable(xy, 0), y = MultiPoly::variable(xy, 1), one = MultiPoly::constant(xy, 1);
  SUBCASE("accepts x d/dx + (y^2 + 1) d/dy") {
    const auto r = check_riccati_cn(make_field("xy", {x, y * y + one}), 1);
    REQUIRE(r.accepted());
    CHECK(r.form->p == x);
    CHECK(r.form->q[0][0] == one);
    CHECK(r.form->q[0][1].is_zero());
    CHECK(r.form->q[0][2] == one);
  }
  SUBCASE("rejects cubic growth") {
    const auto r = check_riccati_cn(make_field("xy", {one, y * y * y}), 1);
    REQUIRE(!r.accepted());
    CHECK(r.rejection->constraint == "deg_{y_n}(Q_n) ≤ 2");
    CHECK(r.rejection->witness_monomial == Exponent{0, 3});
  }
  SUBCASE("rejects cross-variable dependence") {
    const std::vector<std::string> v3{"x", "y1", "y2"};
    const MultiPoly y1 = MultiPoly::variable(v3, 1), y2 = MultiPoly::variable(v3, 2);
    const auto r = check_riccati_cn(make_field("xy", {MultiPoly::constant(v3, 1), y1 * y2, y2 * y2}), 2);
    REQUIRE(!r.accepted());
    CHECK(r.rejection->constraint == "deg_{y_i}(Q_j) = 0");
    CHECK(r.rejection->component == 1);
    CHECK(r.rejection->witness_monomial == Exponent{0, 1, 1});
  }
  SUBCASE("rejects a base component depending on the fiber") {
    const auto r = check_riccati_cn(make_field("xy", {x + y, one}), 1);
    REQUIRE(!r.accepted());
    CHECK(r.rejection->constraint == "P=p(x)");
  }
  SUBCASE("arity mismatch") { CHECK_THROWS_AS(check_riccati_cn(make_field("xy", {x, y}), 2), Error); }
}

TEST_CASE("Theorem-2 checker reassembles random conforming fields") {
  std::mt19937_64 rng(6);
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::string> vars{"x"};
    for (int j = 1; j <= n; ++j) vars.push_back("y" + std::to_string(j));
    for (int trial = 0; trial < 30; ++trial) {
      auto cx = [&] {
        MultiPoly m(vars);
        for (int k = 0; k <= 2; ++k) {
          Exponent e(vars.size(), 0);
          e[0] = k;
          m.add_term(e, random_complex(rng));
        }
        return m;
      };
      std::vector<MultiPoly> comps{cx()};
      for (int j = 1; j <= n; ++j) {
        const MultiPoly y = MultiPoly::variable(vars, j);
        comps.push_back(cx() * y * y + cx() * y + cx());
      }
      const PolyVectorField X = make_field("xy", comps);
      const auto r = check_riccati_cn(X, n);
      REQUIRE(r.accepted());
      CHECK(equal_fields(X, r.form->reassemble(vars)));
    }
  }
}

TEST_CASE("Theorem-3 checker: Okamoto field") {
  const auto r = check_riccati_cp2(okamoto(1, 1));
  REQUIRE(r.accepted());
  const RiccatiCp2Form& f = *r.form;
  CHECK(f.p == cst(1));
  CHECK(f.A.is_zero());
  CHECK(f.B.is_zero());
  CHECK(f.C == cst(1));
  CHECK(f.D.is_zero());
  CHECK(f.E == cst(-1));
  CHECK(f.a == cst(-1));
  CHECK(f.b == cst(-1));
  CHECK(f.c.is_zero());
  CHECK(equal_fields(okamoto(1, 1), f.reassemble(kXYZ)));

  const auto g = check_riccati_cp2(okamoto(Complex(0.3, 2), -4.0));
  REQUIRE(g.accepted());
  CHECK(g.form->a == cst(Complex(-0.3, -2)));
  CHECK(g.form->b == cst(4.0));
}

TEST_CASE("Theorem-3 checker rejections") {
  const MultiPoly y = var(1), z = var(2), x = var(0);
  struct Case {
    const char* name;
    PolyVectorField X;
    const char* constraint;
    const char* violation;
    int possibility;
  };
  const Case cases[] = {
      {"F != 0 with R of degree 0", xyz(cst(1), z * z + y, cst(2)), "F=0", "F≠0", 4},
      {"F != 0 with R = 0", xyz(cst(1), x * z * z, MultiPoly(kXYZ)), "F=0", "F≠0", 4},
      {"F != 0 with linear R", xyz(x, z * z + y * z, y + cst(1)), "F=0", "F≠0", 5},
      {"E without matching R", xyz(cst(1), y * y, z), "d=E", "d≠E", 5},
      {"e != 0", xyz(cst(1), y * y, y * y + y * z), "e=0", "e≠0", 6},
      {"d != E", xyz(cst(1), y * y, cst(2) * y * z), "d=E", "d≠E", 6},
      {"f != D", xyz(cst(1), y * z, z * z * cst(3)), "f=D", "f≠D", 6},
      {"beta > alpha", xyz(cst(1), y, z * z), "β≤α", "β>α", 0},
      {"alpha > 2", xyz(cst(1), y * y * y, z * z * z), "α≤2", "α>2", 0},
      {"base depends on fiber", xyz(cst(1) + y, y, z), "P=p(x)", "P≠p(x)", 0},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto r = check_riccati_cp2(c.X);
    REQUIRE(!r.accepted());
    CHECK(r.rejection->constraint == c.constraint);
    CHECK(r.rejection->violation == c.violation);
    CHECK(r.rejection->possibility == c.possibility);
  }
  const auto f = check_riccati_cp2(xyz(cst(1), x * z * z, MultiPoly(kXYZ)));
  CHECK(f.rejection->witness_monomial == Exponent{1, 0, 2});
}

TEST_CASE("Theorem-3 checker accepts low-degree shapes") {
  // alpha = 0, beta = 1 has the normal shape and is transverse.
  const auto r = check_riccati_cp2(xyz(cst(1), cst(2), var(1)));
  REQUIRE(r.accepted());
  CHECK(r.form->b == cst(1));
  CHECK(transversality_at(xyz(cst(1), cst(2), var(1)), 0.4, FiberKind::CP2).kind == Transversality::Transverse);
  CHECK(check_riccati_cp2(xyz(cst(1), MultiPoly(kXYZ), MultiPoly(kXYZ))).accepted());
}

TEST_CASE("Theorem-3 checker reassembles random normal fields") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const PolyVectorField X = random_normal_field(rng, {random_complex(rng), random_complex(rng)});
    const auto r = check_riccati_cp2(X);
    REQUIRE(r.accepted());
    CHECK(equal_fields(X, r.form->reassemble(kXYZ)));
  }
}

TEST_CASE("root clustering") {
  SUBCASE("closed forms") {
    const Complex c2[] = {0.0, -1.0, 1.0};  // x^2 - x
    auto r = univariate_roots(c2);
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0].value) < 1e-15);
    CHECK(std::abs(r[1].value - 1.0) < 1e-15);
    const Complex sq[] = {0.0, 0.0, 1.0};
    r = univariate_roots(sq);
    REQUIRE(r.size() == 1);
    CHECK(r[0].multiplicity == 2);
  }
  SUBCASE("multiple roots of expanded products") {
    // (x-1)^3 (x-2) and (x-1)^2 (x+i)^2 (x-3)
    const std::vector<std::pair<std::vector<Complex>, std::vector<int>>> cases{
        {{1.0, 1.0, 1.0, 2.0}, {3, 1}},
        {{1.0, 1.0, Complex(0, -1), Complex(0, -1), 3.0}, {2, 2, 1}},
    };
    for (const auto& [roots, mult] : cases) {
      MultiPoly p = cst(1);
      for (Complex r : roots) p = p * (var(0) - cst(r));
      const auto found = univariate_roots(p.univariate_coefficients(0));
      int total = 0;
      for (const auto& f : found) total += f.multiplicity;
      CHECK(total == static_cast<int>(roots.size()));
      CHECK(found.size() == mult.size());
      for (const auto& f : found) {
        const auto near = std::count_if(roots.begin(), roots.end(), [&](Complex r) { return std::abs(r - f.value) < 1e-4; });
        CHECK(near == f.multiplicity);
        CHECK(std::find(mult.begin(), mult.end(), f.multiplicity) != mult.end());
      }
    }
  }
  SUBCASE("random high degree with known roots") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Complex> roots;
      while (roots.size() < 6) {
        const Complex r = random_complex(rng, 3.0);
        if (std::all_of(roots.begin(), roots.end(), [&](Complex s) { return std::abs(s - r) > 0.3; })) roots.push_back(r);
      }
      MultiPoly p = cst(random_nonzero(rng));
      for (Complex r : roots) p = p * (var(0) - cst(r));
      const auto found = univariate_roots(p.univariate_coefficients(0));
      REQUIRE(found.size() == roots.size());
      for (Complex r : roots) {
        double best = 1e9;
        for (const auto& f : found) best = std::min(best, std::abs(f.value - r));
        CHECK(best < 1e-9);
      }
    }
  }
}

TEST_CASE("invariant fibers") {
  SUBCASE("p = x(x-1)") {
    const PolyVectorField X = xyz(var(0) * (var(0) - cst(1)), var(1), MultiPoly(kXYZ));
    const FiberSet f = invariant_fibers(X.components[0], X);
    REQUIRE(f.finite_fibers.size() == 2);
    CHECK(std::abs(f.finite_fibers[0].value) < 1e-14);
    CHECK(std::abs(f.finite_fibers[1].value - 1.0) < 1e-14);
    CHECK_FALSE(f.infinity_invariant);
  }
  SUBCASE("Okamoto field: only infinity") {
    const auto r = check_riccati_cp2(okamoto(1, 1));
    const FiberSet f = invariant_fibers(*r.form, okamoto(1, 1));
    CHECK(f.finite_fibers.empty());
    CHECK(f.infinity_invariant);
  }
  SUBCASE("p = x^2") {
    const PolyVectorField X = xyz(var(0) * var(0), MultiPoly(kXYZ), MultiPoly(kXYZ));
    const FiberSet f = invariant_fibers(X.components[0], X);
    REQUIRE(f.finite_fibers.size() == 1);
    CHECK(f.finite_fibers[0].multiplicity == 2);
  }
  SUBCASE("p = 0") {
    const PolyVectorField X = xyz(MultiPoly(kXYZ), var(1), MultiPoly(kXYZ));
    CHECK(invariant_fibers(X.components[0], X).all_invariant);
  }
  SUBCASE("fiber count equals deg p") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 30; ++trial) {
      const MultiPoly p = random_in_x(rng, 1 + trial % 5);
      const PolyVectorField X = xyz(p, MultiPoly(kXYZ), MultiPoly(kXYZ));
      int total = 0;
      for (const auto& c : invariant_fibers(p, X).finite_fibers) {
        total += c.multiplicity;
        const auto coeffs = p.univariate_coefficients(0);
        CHECK(std::abs(eval_univariate(coeffs, c.value)) <= 1e-8 * std::pow(1.0 + std::abs(c.value), p.deg_in(0)));
      }
      CHECK(total == p.deg_in(0));
    }
  }
  SUBCASE("not a Riccati base") {
    const PolyVectorField X = xyz(var(1), MultiPoly(kXYZ), MultiPoly(kXYZ));
    CHECK_THROWS_AS(invariant_fibers(X.components[0], X), Error);
  }
}

TEST_CASE("transversality examples") {
  SUBCASE("Okamoto field is transverse at 0") {
    CHECK(transversality_at(okamoto(1, 1), 0.0, FiberKind::CP2).kind == Transversality::Transverse);
  }
  SUBCASE("x d/dx + y^2 d/dy fails at the invariant fiber") {
    const std::vector<std::string> xy{"x", "y1"};
    const PolyVectorField X =
        make_field("xy", {MultiPoly::variable(xy, 0), MultiPoly::variable(xy, 1) * MultiPoly::variable(xy, 1)});
    const auto v = transversality_at(X, 0.0, FiberKind::Polydisk);
    CHECK(v.kind != Transversality::Transverse);
    REQUIRE(v.witness.size() == 2);
    CHECK(v.witness[0] == Complex(0.0));
    CHECK(transversality_at(X, 0.5, FiberKind::Polydisk).kind == Transversality::Transverse);
  }
  SUBCASE("Possibility-4 field has a witness on u = 0") {
    const PolyVectorField X = xyz(cst(1), var(2) * var(2) + var(1), cst(2));
    for (Complex x0 : {Complex(0.3, 0.1), Complex(-2, 1)}) {
      const auto v = transversality_at(X, x0, FiberKind::CP2);
      CHECK(v.kind != Transversality::Transverse);
      CHECK(v.chart == "cp2_uv");
      REQUIRE(v.witness.size() == 3);
      CHECK(v.witness[0] == x0);
      CHECK(std::abs(v.witness[1]) == 0.0);
    }
  }
}

TEST_CASE("normal fields are transverse away from zeros of p, violators nowhere") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    const PolyVectorField X = random_normal_field(rng, {random_complex(rng)});
    const Complex x0 = random_complex(rng, 2.0);
    CHECK(transversality_at(X, x0, FiberKind::CP2).kind == Transversality::Transverse);
  }
  for (int trial = 0; trial < 200; ++trial) {
    PolyVectorField X = random_normal_field(rng, {random_complex(rng)});
    const MultiPoly extra = random_in_x(rng, 1);
    switch (trial % 4) {
      case 0: X.components[1] += extra * var(2) * var(2); break;            // F != 0
      case 1: X.components[2] += extra * var(1) * var(1); break;            // e != 0
      case 2: X.components[2] += extra * var(1) * var(2); break;            // d != E
      case 3: X.components[2] += extra * var(2) * var(2) * var(1); break;   // beta > alpha
    }
    REQUIRE(!check_riccati_cp2(X).accepted());
    const Complex x0 = random_complex(rng, 2.0);
    CHECK(transversality_at(X, x0, FiberKind::CP2).kind != Transversality::Transverse);
  }
}

TEST_CASE("transverse verdict does not depend on chart order") {
  std::mt19937_64 rng(17);
  std::vector<int> order{0, 1, 2};
  for (int trial = 0; trial < 30; ++trial) {
    PolyVectorField X = random_normal_field(rng, {random_complex(rng)});
    if (trial % 2) X.components[1] += var(2) * var(2);
    const Complex x0 = random_complex(rng, 2.0);
    const Transversality ref = transversality_at(X, x0, FiberKind::CP2).kind;
    std::sort(order.begin(), order.end());
    do {
      const bool transverse = transversality_at(X, x0, FiberKind::CP2, order).kind == Transversality::Transverse;
      CHECK(transverse == (ref == Transversality::Transverse));
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST_CASE("corollary check") {
  SUBCASE("Okamoto field") {
    const CorollaryReport r = corollary_check(okamoto(1, 1), FiberKind::CP2, 0);
    CHECK(r.status == CorollaryStatus::ImplicationVerified);
    REQUIRE(r.transverse_x.has_value());
  }
  SUBCASE("Possibility-4 field") {
    const CorollaryReport r = corollary_check(xyz(cst(1), var(2) * var(2), cst(1)), FiberKind::CP2, 0);
    CHECK(r.status == CorollaryStatus::NoTransverseFiber);
    CHECK(r.samples == 32);
  }
  SUBCASE("horizontal field") {
    const PolyVectorField X = xyz(cst(1), MultiPoly(kXYZ), MultiPoly(kXYZ));
    const CorollaryReport r = corollary_check(X, FiberKind::CP2, 0);
    CHECK(r.status == CorollaryStatus::ImplicationVerified);
    const auto form = check_riccati_cp2(X).form;
    CHECK((form->A.is_zero() && form->E.is_zero() && form->a.is_zero()));
  }
  SUBCASE("deterministic given the seed") {
    const PolyVectorField X = xyz(var(0) * var(0) - cst(4), var(1), var(2));
    const auto a = corollary_check(X, FiberKind::CP2, 5), b = corollary_check(X, FiberKind::CP2, 5);
    CHECK(a.transverse_x == b.transverse_x);
    CHECK(a.sample_radius == doctest::Approx(3.0));
  }
}
