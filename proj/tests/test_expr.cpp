#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "gentwist/expr.hpp"
#include "gentwist/rng.hpp"

using namespace gentwist;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

Vec pt(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

// Central finite differences of a parsed expression, used as an independent
// oracle for the analytic jets.
double fdGrad(const Expr& e, const Vec& p, int k, double h) {
  Vec a = p, b = p;
  a(k) += h;
  b(k) -= h;
  return (e.value(a) - e.value(b)) / (2 * h);
}

double fdHess(const Expr& e, const Vec& p, int k, int l, double h) {
  Vec pp = p, pm = p, mp = p, mm = p;
  pp(k) += h;
  pp(l) += h;
  pm(k) += h;
  pm(l) -= h;
  mp(k) -= h;
  mp(l) += h;
  mm(k) -= h;
  mm(l) -= h;
  return (e.value(pp) - e.value(pm) - e.value(mp) + e.value(mm)) / (4 * h * h);
}

}  // namespace

TEST_CASE("values of arithmetic and calls") {
  const Vec p = pt(0.7, -1.3);
  CHECK(parseExpr("2 + 3*4", kXY).value(p) == doctest::Approx(14.0));
  CHECK(parseExpr("2*x + y", kXY).value(p) == doctest::Approx(2 * 0.7 - 1.3));
  CHECK(parseExpr("x^2^3", kXY).value(p) == doctest::Approx(std::pow(0.7, 8.0)));  // right assoc
  CHECK(parseExpr("-x^2", kXY).value(p) == doctest::Approx(-0.49));
  CHECK(parseExpr("(2 + x)*(y - 1)", kXY).value(p) == doctest::Approx(2.7 * (-2.3)));
  CHECK(parseExpr("6/4/2", kXY).value(p) == doctest::Approx(0.75));  // left assoc
  CHECK(parseExpr("sin(x)^2 + cos(x)^2", kXY).value(p) == doctest::Approx(1.0));
  CHECK(parseExpr("exp(log(2.5))", kXY).value(p) == doctest::Approx(2.5));
  CHECK(parseExpr("sqrt(x^2)", kXY).value(p) == doctest::Approx(0.7));
  CHECK(parseExpr("atan(1)*4", kXY).value(p) == doctest::Approx(3.14159265358979324));
  CHECK(parseExpr("1e-2 + 1.5E+1", kXY).value(p) == doctest::Approx(15.01));
  CHECK(parseExpr("x^-2", kXY).value(p) == doctest::Approx(std::pow(0.7, -2.0)));
}

TEST_CASE("parse errors carry location and expectations") {
  CHECK_THROWS_AS(parseExpr("", kXY), ParseError);
  CHECK_THROWS_AS(parseExpr("2 +", kXY), ParseError);
  CHECK_THROWS_AS(parseExpr("(2", kXY), ParseError);
  CHECK_THROWS_AS(parseExpr("2 2", kXY), ParseError);
  CHECK_THROWS_AS(parseExpr("bogus(2)", kXY), ParseError);
  CHECK_THROWS_AS(parseExpr("z + 1", kXY), ParseError);  // unknown coordinate
  CHECK_THROWS_AS(parseExpr("sin 2", kXY), ParseError);
  try {
    parseExpr("1 + \n  (2 * ", kXY);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col > 0);
    CHECK(!e.expected.empty());
  }
  try {
    parseExpr("zz", kXY);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
}

TEST_CASE("print round-trips through the parser") {
  Rng rng(11);
  const char* samples[] = {"2*x + sin(y)^3",         "-x*y + exp(x/(1 + y^2))",
                           "sqrt(1 + x^2) - atan(y)", "x^2*y - 3.25*y + 0.5",
                           "log(2 + cos(x))*y",       "1/(1 + x^2 + y^2)^2"};
  for (const char* s : samples) {
    const Expr e = parseExpr(s, kXY);
    const Expr round = parseExpr(e.print(), kXY);
    for (int t = 0; t < 25; t++) {
      const Vec p = pt(rng.uniform(-1, 1), rng.uniform(-1, 1));
      CHECK(e.value(p) == doctest::Approx(round.value(p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("jets match finite differences on random expressions") {
  Rng rng(7);
  const char* pool[] = {"x",
                        "y",
                        "x*y",
                        "x^2",
                        "sin(x)",
                        "cos(x*y)",
                        "exp(0.3*x)",
                        "sqrt(2 + x^2 + y^2)",
                        "atan(x - y)",
                        "log(3 + x)",
                        "x/(2 + y^2)",
                        "(x + y)^3"};
  int checked = 0;
  for (int trial = 0; trial < 200; trial++) {
    // Random sums of pool entries with random coefficients.
    std::string text;
    const int terms = 1 + static_cast<int>(rng.next() % 3);
    for (int t = 0; t < terms; t++) {
      if (t) text += " + ";
      const double c = rng.uniform(-2, 2);
      text += std::to_string(c) + "*" + pool[rng.next() % (sizeof(pool) / sizeof(pool[0]))];
    }
    const Expr e = parseExpr(text, kXY);
    const Vec p = pt(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
    const Jet2 j = e.jet(p);
    CHECK(j.v == doctest::Approx(e.value(p)).epsilon(1e-12));
    const double h = 1e-5;
    for (int k = 0; k < 2; k++) {
      const double want = fdGrad(e, p, k, h);
      CHECK(j.g(k) == doctest::Approx(want).epsilon(1e-5).scale(1.0));
      for (int l = 0; l < 2; l++) {
        const double hw = fdHess(e, p, k, l, 5e-4);
        CHECK(j.h(k, l) == doctest::Approx(hw).epsilon(2e-4).scale(1.0));
      }
    }
    checked++;
  }
  CHECK(checked == 200);
}

TEST_CASE("jets are exact on polynomials") {
  const Expr e = parseExpr("2*x^2 - 3*x*y + y^2 + 5*x - 7", kXY);
  const Vec p = pt(1.5, -2.0);
  const Jet2 j = e.jet(p);
  CHECK(j.v == doctest::Approx(2 * 2.25 - 3 * 1.5 * (-2) + 4 + 7.5 - 7));
  CHECK(j.g(0) == doctest::Approx(4 * 1.5 - 3 * (-2) + 5));
  CHECK(j.g(1) == doctest::Approx(-3 * 1.5 + 2 * (-2)));
  CHECK(j.h(0, 0) == doctest::Approx(4.0));
  CHECK(j.h(0, 1) == doctest::Approx(-3.0));
  CHECK(j.h(1, 0) == doctest::Approx(-3.0));
  CHECK(j.h(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("structural constructors compose") {
  const Expr x = Expr::coordinate(0, "x");
  const Expr two = Expr::number(2.0);
  const Expr m = Expr::multiply(two, x);
  const Expr neg = Expr::negate(m);
  const Vec p = pt(3.0, 0.0);
  CHECK(m.value(p) == doctest::Approx(6.0));
  CHECK(neg.value(p) == doctest::Approx(-6.0));
  CHECK(neg.jet(p).g(0) == doctest::Approx(-2.0));
  CHECK(Expr().empty());
  CHECK(!neg.empty());
}
