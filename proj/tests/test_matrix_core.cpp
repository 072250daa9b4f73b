#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "riccati/proj_map.hpp"
#include "test_support.hpp"

using namespace riccati;
using namespace riccati::testing;

namespace {

Matrix3c diag3(Complex a, Complex b, Complex c) {
  Matrix3c m = Matrix3c::Zero();
  m.diagonal() << a, b, c;
  return m;
}

std::vector<Correspondence> correspondences_through(const Matrix3c& m, std::mt19937_64& rng, int count) {
  std::vector<Correspondence> out;
  for (int i = 0; i < count; ++i) {
    Vector3c s(random_complex(rng), random_complex(rng), random_complex(rng));
    out.push_back({s, m * s});
  }
  return out;
}

}  // namespace

TEST_CASE("char_poly of the identity is (t-1)^3") {
  const CharPoly p = char_poly(Matrix3c::Identity());
  CHECK(std::abs(p.c0 - Complex(-1)) == 0.0);
  CHECK(std::abs(p.c1 - Complex(3)) == 0.0);
  CHECK(std::abs(p.c2 - Complex(-3)) == 0.0);
}

TEST_CASE("char_poly of diag(2,3,5) expands (t-2)(t-3)(t-5)") {
  const CharPoly p = char_poly(diag3(2, 3, 5));
  CHECK(std::abs(p.c0 - Complex(-30)) < 1e-14);
  CHECK(std::abs(p.c1 - Complex(31)) < 1e-14);
  CHECK(std::abs(p.c2 - Complex(-10)) < 1e-14);

  auto roots = cubic_roots(p);
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) { return a.real() < b.real(); });
  CHECK(std::abs(roots[0] - Complex(2)) < 1e-12);
  CHECK(std::abs(roots[1] - Complex(3)) < 1e-12);
  CHECK(std::abs(roots[2] - Complex(5)) < 1e-12);
}

TEST_CASE("char_poly vanishes at every reported eigenvalue") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const JordanCase c = kAllCases[trial % 6];
    const Matrix3c p0 = random_well_conditioned(rng);
    const Matrix3c m = p0.inverse() * random_normal_form(rng, c) * p0;
    const CharPoly p = char_poly(m);
    for (const auto& cl : eigen_structure(m).clusters) {
      const double bound = 1e-8 * std::pow(1.0 + std::abs(cl.value), 3);
      CHECK(std::abs(p(cl.value)) <= bound);
    }
  }
}

TEST_CASE("eigen_structure on reference matrices") {
  SUBCASE("distinct eigenvalues") {
    const EigenData d = eigen_structure(diag3(2, 3, 5), 1e-8);
    REQUIRE(d.clusters.size() == 3);
    CHECK(std::abs(d.clusters[0].value - Complex(5)) < 1e-12);
    CHECK(std::abs(d.clusters[2].value - Complex(2)) < 1e-12);
    for (const auto& c : d.clusters) {
      CHECK(c.algebraic == 1);
      CHECK(c.geometric == 1);
    }
  }
  SUBCASE("identity") {
    const EigenData d = eigen_structure(Matrix3c::Identity(), 1e-8);
    REQUIRE(d.clusters.size() == 1);
    CHECK(std::abs(d.clusters[0].value - Complex(1)) < 1e-14);
    CHECK(d.clusters[0].algebraic == 3);
    CHECK(d.clusters[0].geometric == 3);
  }
  SUBCASE("one 2x2 block with a trailing 1x1 block of the same eigenvalue") {
    Matrix3c m = Matrix3c::Identity();
    m(0, 1) = 1.0;
    CHECK(elimination_rank(m - Matrix3c::Identity()) == 1);
    const EigenData d = eigen_structure(m, 1e-8);
    REQUIRE(d.clusters.size() == 1);
    CHECK(d.clusters[0].algebraic == 3);
    CHECK(d.clusters[0].geometric == 3 - elimination_rank(m - Matrix3c::Identity()));
  }
  SUBCASE("singular input") {
    CHECK_THROWS_AS(eigen_structure(diag3(1, 2, 0), 1e-8), Error);
    try {
      eigen_structure(diag3(1, 2, 0), 1e-8);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateMatrix);
    }
  }
  SUBCASE("non-positive tolerance") { CHECK_THROWS_AS(eigen_structure(Matrix3c::Identity(), 0.0), Error); }
}

TEST_CASE("eigen_structure multiplicities survive conjugation noise") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 600; ++trial) {
    const JordanCase c = kAllCases[trial % 6];
    const Matrix3c j = random_normal_form(rng, c);
    const Matrix3c p0 = random_well_conditioned(rng);
    const EigenData d = eigen_structure(p0.inverse() * j * p0);
    int alg = 0;
    for (const auto& cl : d.clusters) {
      alg += cl.algebraic;
      CHECK(cl.geometric >= 1);
      CHECK(cl.geometric <= cl.algebraic);
    }
    CHECK(alg == 3);
    const size_t expected_clusters = c == JordanCase::I ? 3 : (c == JordanCase::II1 || c == JordanCase::II2) ? 2 : 1;
    CHECK(d.clusters.size() == expected_clusters);
  }
}

TEST_CASE("jordan_form reference cases") {
  SUBCASE("diagonal input gives case I and a permutation conjugator") {
    const JordanDecomposition jd = jordan_form(diag3(2, 3, 5));
    CHECK(jd.case_tag == JordanCase::I);
    CHECK((jd.J - diag3(5, 3, 2)).norm() < 1e-12);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        const double a = std::abs(jd.P(i, k));
        CHECK((a < 1e-12 || std::abs(a - 1.0) < 1e-12));
      }
  }
  SUBCASE("case II2 input is its own Jordan form") {
    Matrix3c m = diag3(1, 1, 2);
    m(0, 1) = 1.0;
    const JordanDecomposition jd = jordan_form(m);
    CHECK(jd.case_tag == JordanCase::II2);
    CHECK((jd.J - m).norm() < 1e-12);
  }
  SUBCASE("conjugated III3 block") {
    std::mt19937_64 rng(3);
    const Matrix3c j = random_normal_form(rng, JordanCase::III3);
    const Matrix3c p0 = random_well_conditioned(rng);
    const Matrix3c m = p0.inverse() * j * p0;
    const JordanDecomposition jd = jordan_form(m);
    CHECK(jd.case_tag == JordanCase::III3);
    CHECK(std::abs(jd.J(0, 0) - j(0, 0)) < 1e-10);
    CHECK((m - jd.P.inverse() * jd.J * jd.P).norm() <= 1e-8 * m.norm());
  }
  SUBCASE("badly conditioned eigenbasis is reported") {
    Matrix3c p0 = Matrix3c::Identity();
    p0(0, 1) = 1.0;
    p0(1, 1) = 1.0 + 1e-13;
    p0(2, 2) = 1.0;
    p0(1, 0) = 1.0;
    const Matrix3c m = p0 * diag3(1, 2, 3) * p0.inverse();
    try {
      jordan_form(m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::IllConditioned || e.kind() == ErrorKind::DegenerateMatrix));
    }
  }
}

TEST_CASE("jordan_form reconstructs every case under random conjugation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 600; ++trial) {
    const JordanCase c = kAllCases[trial % 6];
    const Matrix3c p0 = random_well_conditioned(rng);
    const Matrix3c m = p0.inverse() * random_normal_form(rng, c) * p0;
    const JordanDecomposition jd = jordan_form(m);
    CHECK(jd.case_tag == c);
    CHECK((m - jd.P.inverse() * jd.J * jd.P).norm() <= 1e-8 * m.norm());
  }
}

TEST_CASE("mat_exp") {
  SUBCASE("zero matrix") {
    CHECK((mat_exp(Matrix3c::Zero().eval()) - Matrix3c::Identity()).norm() == 0.0);
    CHECK((mat_exp(Matrix2c::Zero().eval()) - Matrix2c::Identity()).norm() == 0.0);
  }
  SUBCASE("diagonal multipliers") {
    const Complex a1(0.3, -0.2), a2(-1.1, 0.4);
    Matrix2c m = Matrix2c::Zero();
    m.diagonal() << kTwoPiI * a1, kTwoPiI * a2;
    const Matrix2c e = mat_exp(m);
    CHECK(std::abs(e(0, 0) - std::exp(kTwoPiI * a1)) < 1e-12 * std::abs(e(0, 0)));
    CHECK(std::abs(e(1, 1) - std::exp(kTwoPiI * a2)) < 1e-12 * std::abs(e(1, 1)));
    CHECK(e(0, 1) == Complex(0));
    CHECK(e(1, 0) == Complex(0));
  }
  SUBCASE("unipotent-times-scalar block") {
    const Complex mu(1.3, 0.7), nu(-0.4, 0.9);
    const Complex lambda = alpha_from_lambda(mu);
    Matrix2c a;
    a << lambda, nu / (kTwoPiI * mu), 0.0, lambda;
    const Matrix2c e = mat_exp((kTwoPiI * a).eval());
    Matrix2c expected;
    expected << mu, nu, 0.0, mu;
    CHECK((e - expected).norm() < 1e-12 * expected.norm());
    CHECK(e(1, 0) == Complex(0));
  }
  SUBCASE("scalar plus nilpotent splits") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix3c d = random_complex(rng, 2.0) * Matrix3c::Identity();
      Matrix3c n = Matrix3c::Zero();
      n(0, 1) = random_complex(rng, 2.0);
      n(0, 2) = random_complex(rng, 2.0);
      n(1, 2) = random_complex(rng, 2.0);
      const Matrix3c lhs = mat_exp((d + n).eval());
      const Matrix3c rhs = mat_exp(d) * mat_exp(n);
      CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }
  }
  SUBCASE("agrees with an independent Pade implementation") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix3c m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = random_complex(rng, 3.0);
      const Matrix3c expected = m.exp();
      CHECK((mat_exp(m) - expected).norm() <= 1e-11 * expected.norm());
    }
  }
}

TEST_CASE("alpha_from_lambda branch") {
  CHECK(std::abs(alpha_from_lambda(Complex(1))) == 0.0);
  CHECK(std::abs(alpha_from_lambda(Complex(0, 1)) - Complex(0.25)) < 1e-15);
  CHECK(std::abs(alpha_from_lambda(Complex(-1)) - Complex(0.5)) < 1e-15);
  CHECK(std::abs(alpha_from_lambda(Complex(-1, -0.0)) - Complex(0.5)) < 1e-15);
  CHECK(std::abs(alpha_from_lambda(Complex(0, 1), 2) - Complex(2.25)) < 1e-15);
  CHECK_THROWS_AS(alpha_from_lambda(Complex(0)), Error);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> logr(-5.0, 5.0), ang(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const Complex lambda = std::polar(std::exp(logr(rng)), ang(rng));
    const Complex alpha = alpha_from_lambda(lambda);
    CHECK(std::abs(std::exp(kTwoPiI * alpha) - lambda) <= 1e-12 * std::abs(lambda));
    CHECK(alpha.real() > -0.5);
    CHECK(alpha.real() <= 0.5);
  }
}

TEST_CASE("fit_projective") {
  std::mt19937_64 rng(21);
  SUBCASE("identity") {
    const auto corrs = correspondences_through(Matrix3c::Identity(), rng, 6);
    const ProjectiveFit fit = fit_projective(corrs);
    CHECK(fit.residual < 1e-12);
    CHECK((fit.map.matrix() - Matrix3c::Identity() / std::sqrt(3.0)).norm() < 1e-12);
  }
  SUBCASE("diag(2,3,5)") {
    const Matrix3c m = diag3(2, 3, 5);
    const ProjectiveFit fit = fit_projective(correspondences_through(m, rng, 6));
    CHECK(fit.residual < 1e-10);
    CHECK((fit.map.matrix() - normalize_projective(m)).norm() < 1e-10);
  }
  SUBCASE("conjugated Jordan block") {
    const Matrix3c p0 = random_well_conditioned(rng);
    const Matrix3c m = p0.inverse() * random_normal_form(rng, JordanCase::III3) * p0;
    const ProjectiveFit fit = fit_projective(correspondences_through(m, rng, 6));
    CHECK(projective_distance(fit.map, ProjMap(m)) < 1e-8);
  }
  SUBCASE("minimal four points") {
    const Matrix3c m = random_well_conditioned(rng);
    const ProjectiveFit fit = fit_projective(correspondences_through(m, rng, 4));
    CHECK(projective_distance(fit.map, ProjMap(m)) < 1e-8);
  }
  SUBCASE("scale invariance of targets") {
    const Matrix3c m = random_well_conditioned(rng);
    auto corrs = correspondences_through(m, rng, 8);
    corrs[3].target += Vector3c(1e-6, 0, 0);  // make the residual non-trivial
    const ProjectiveFit a = fit_projective(corrs);
    const Complex c = random_nonzero(rng, 0.1, 10.0);
    for (auto& x : corrs) x.target *= c;
    const ProjectiveFit b = fit_projective(corrs);
    CHECK(projective_distance(a.map, b.map) < 1e-10);
    CHECK(std::abs(a.residual - b.residual) < 1e-12);
  }
  SUBCASE("degenerate configurations") {
    std::vector<Correspondence> corrs;
    for (int i = 0; i < 6; ++i) {
      const Vector3c s(1.0, double(i), 0.0);  // all on the line z = 0
      corrs.push_back({s, s});
    }
    CHECK_THROWS_AS(fit_projective(corrs), Error);
    corrs.resize(3);
    CHECK_THROWS_AS(fit_projective(corrs), Error);
  }
}

TEST_CASE("normalization conventions") {
  std::mt19937_64 rng(4);
  const Matrix3c m = random_well_conditioned(rng);
  const Matrix3c n = normalize_projective(m);
  CHECK(std::abs(n.norm() - 1.0) < 1e-14);
  CHECK((normalize_projective(n) - n).norm() < 1e-14);
  CHECK((normalize_projective(Complex(0, 3) * m) - n).norm() < 1e-14);
  CHECK_THROWS_AS(normalize_point(Vector3c::Zero()), Error);
  CHECK_THROWS_AS(ProjMap(Matrix3c::Zero()), Error);
}
