#include <doctest.h>

#include "json_io.hpp"
#include "test_support.hpp"

using namespace riccati;
using namespace riccati::testing;
using io::Json;

TEST_CASE("matrix and complex round trips") {
  std::mt19937_64 rng(1);
  Matrix3c m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = random_complex(rng);
  const Json j = Json::parse(io::dump(io::to_json(m)));
  CHECK(io::matrix_from_json(j) == m);
  CHECK(io::matrix_from_json(Json{{"matrix", j}}) == m);
  CHECK(io::complex_from_json(Json(2.5)) == Complex(2.5, 0.0));
  CHECK(io::parse_complex_text("1.5,-2") == Complex(1.5, -2.0));
  CHECK(io::parse_complex_text("3") == Complex(3.0, 0.0));
  CHECK_THROWS_AS(io::parse_complex_text("1;2"), Error);
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("[[1,2],[3,4]]")), Error);
}

TEST_CASE("polynomial and field round trips") {
  std::mt19937_64 rng(2);
  const std::vector<std::string> vars{"x", "y", "z"};
  const PolyVectorField X = make_field("xyz", {random_poly(rng, vars, 2), random_poly(rng, vars, 3), random_poly(rng, vars, 1)});
  const PolyVectorField back = io::field_from_json(Json::parse(io::dump(io::to_json(X))));
  REQUIRE(back.dimension() == 3);
  for (int i = 0; i < 3; ++i) CHECK(back.components[i] == X.components[i]);
  CHECK_THROWS_AS(io::poly_from_json(Json::parse(R"({"vars":["x"],"terms":[{"exp":[1,2],"coef":[1,0]}]})")), Error);
  CHECK_THROWS_AS(io::poly_from_json(Json::parse(R"({"vars":["x"],"terms":[{"exp":[-1],"coef":[1,0]}]})")), Error);
}

TEST_CASE("loop round trip") {
  LoopPath loop;
  loop.base_point = Complex(1, 0);
  loop.segments.push_back(PathSegment::line(Complex(1, 0), Complex(2, 0)));
  loop.segments.push_back(PathSegment::arc(0.0, 2.0, 0.0, 2.0 * kPi));
  loop.segments.push_back(PathSegment::line(Complex(2, 0), Complex(1, 0)));
  const LoopPath back = io::loop_from_json(Json::parse(io::dump(io::to_json(loop))));
  REQUIRE(back.segments.size() == 3);
  CHECK(back.segments[1].radius == 2.0);
  CHECK(back.segments[1].theta1 == 2.0 * kPi);
  Json open = io::to_json(loop);
  open["segments"].erase(2);
  CHECK_THROWS_AS(io::loop_from_json(open), Error);
}

TEST_CASE("dump prints 17 significant digits") {
  const std::string s = io::dump(Json{{"v", 0.1}, {"w", 1.0}, {"n", 3}, {"z", -0.0}}, 0);
  CHECK(s == "{\"v\":0.10000000000000001,\"w\":1.0,\"n\":3,\"z\":0.0}\n");
  CHECK(Json::parse(s)["v"].get<double>() == 0.1);
}
