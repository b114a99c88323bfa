#include <doctest.h>

#include <cmath>

#include "monoiter/expression.hpp"
#include "monoiter/geometry.hpp"

using namespace monoiter;

namespace {

double eval(const char* text, double x = 0, double y = 0, double z = 0) {
  return Expression::parse(text).evaluate(x, y, z);
}

std::size_t error_position(const char* text) {
  try {
    (void)Expression::parse(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  return std::string::npos;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2 * 3") == 7);
  CHECK(eval("(1 + 2) * 3") == 9);
  CHECK(eval("8 / 4 / 2") == 1);
  CHECK(eval("10 - 4 - 3") == 3);
  CHECK(eval("2 ^ 3 ^ 2") == 512);
  CHECK(eval("-2 ^ 2") == -4);
  CHECK(eval("2 ^ -1") == 0.5);
  CHECK(eval("-x * y", 2, 3) == -6);
  CHECK(eval("2 * -3") == -6);
  CHECK(eval("--3") == 3);
  CHECK(eval("+4") == 4);
  CHECK(eval("2 * 3 ^ 2") == 18);
  CHECK(eval("1.5e2 + .5 + 3.") == 153.5);
  CHECK(eval("2E-1") == doctest::Approx(0.2));
}

TEST_CASE("variables and functions") {
  CHECK(eval("x + 10 * y + 100 * z", 1, 2, 3) == 321);
  CHECK(eval("sin(x)", 0.3) == std::sin(0.3));
  CHECK(eval("cos(y)", 0, 0.4) == std::cos(0.4));
  CHECK(eval("exp(z)", 0, 0, 1.2) == std::exp(1.2));
  CHECK(eval("abs(x - 5)", 2) == 3);
  CHECK(eval("2 + 0.5 * z", 0, 0, -1) == 1.5);
  CHECK(Expression::parse(" 1+x ").text() == " 1+x ");
}

TEST_CASE("parse errors carry the position") {
  CHECK(error_position("") == 0);
  CHECK(error_position("1 +") == 3);
  CHECK(error_position("2 * w") == 4);
  CHECK(error_position("sin x") == 4);
  CHECK(error_position("(1 + 2") == 6);
  CHECK(error_position("1 2") == 2);
  CHECK(error_position("1e+") == 1);
  CHECK(error_position("3 $ 4") == 2);
  CHECK_THROWS_AS(Expression::parse("pi"), InputError);
}

TEST_CASE("parse_coefficient") {
  const DomainPtr torus = build_flat_torus({{16, 6.2832}, {16, 6.2832}});
  const Field one = parse_coefficient("1", torus);
  CHECK(one.min() == 1.0);
  CHECK(one.max() == 1.0);
  const Field s = parse_coefficient("2 + sin(x)", torus);
  CHECK(s.min() >= 1.0);
  CHECK(s.max() <= 3.0);
  CHECK(s.max() - s.min() > 1.9);

  const DomainPtr sphere = build_icosphere(2, 1.0);
  const Field a = parse_coefficient("2+0.5*z", sphere);
  for (int i = 0; i < sphere->vertex_count(); ++i)
    CHECK(a[i] == 2 + 0.5 * sphere->coordinates()[i][2]);

  try {
    (void)parse_coefficient("1/(x-x)", torus);
    FAIL("division by zero accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("vertex 0") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_coefficient("1 +* 2", torus), ParseError);
}
