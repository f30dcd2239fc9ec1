#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mfa/number_field.hpp"

using namespace mfa;

namespace {

FieldPtr golden() {
  // x^2 - x - 1, root phi in (1,2)
  return NumberField::make({Rational(-1), Rational(-1), Rational(1)}, Rational(1), Rational(2));
}

Rational rand_rat(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-12, 12), den(1, 9);
  return rat(num(rng), den(rng));
}

AlgebraicReal rand_elem(const FieldPtr& f, std::mt19937& rng) {
  std::vector<Rational> c(f->degree());
  for (auto& x : c) x = rand_rat(rng);
  return AlgebraicReal(f, c);
}

}  // namespace

TEST_CASE("field_make validates squarefreeness and root isolation") {
  // (x-1)^2 is not squarefree
  CHECK_THROWS_AS(NumberField::make({Rational(1), Rational(-2), Rational(1)}, Rational(0),
                                    Rational(2)),
                  Error);
  // x^2 - 3x + 2 has two roots in (0,3)
  try {
    NumberField::make({Rational(2), Rational(-3), Rational(1)}, Rational(0), Rational(3));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MultipleRootsInBracket);
  }
  // x^2 - x - 1 has no root in (2,3): same nonzero sign at both endpoints
  try {
    NumberField::make({Rational(-1), Rational(-1), Rational(1)}, Rational(3), Rational(4));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoRootInBracket);
  }
}

TEST_CASE("golden mean identities") {
  auto f = golden();
  AlgebraicReal th = AlgebraicReal::theta(f);
  AlgebraicReal one(f, Rational(1));
  CHECK(th * th == th + one);         // theta^2 = theta + 1
  CHECK(th.inverse() == th - one);    // 1/theta = theta - 1
  CHECK((th - one).sign() == 1);      // phi > 1
  CHECK((th - AlgebraicReal(f, Rational(2))).sign() == -1);  // phi < 2
}

TEST_CASE("degree-1 field behaves like Q") {
  auto f = NumberField::make({rat(-1, 3), Rational(1)}, Rational(0), Rational(1));
  CHECK(f->degree() == 1);
  AlgebraicReal th = AlgebraicReal::theta(f);
  CHECK(th.is_rational());
  CHECK(th.rational_value() == rat(1, 3));
  AlgebraicReal a(f, rat(2, 9)), b(f, rat(1, 9));
  CHECK((a + b).rational_value() == rat(1, 3));
}

TEST_CASE("cubic Pisot field from x^3-2x^2+x-1") {
  auto f = NumberField::make({Rational(-1), Rational(1), Rational(-2), Rational(1)}, Rational(1),
                             Rational(2));
  AlgebraicReal th = AlgebraicReal::theta(f);
  auto [v, eps] = th.to_float(53);
  CHECK(v == doctest::Approx(1.7548776662466925).epsilon(1e-12));
  AlgebraicReal lam = th.inverse();
  CHECK((lam * th - AlgebraicReal(f, Rational(1))).is_zero());
}

TEST_CASE("field axioms on random elements") {
  auto f = golden();
  std::mt19937 rng(7);
  for (int iter = 0; iter < 60; ++iter) {
    auto a = rand_elem(f, rng), b = rand_elem(f, rng), c = rand_elem(f, rng);
    CHECK(((a + b) + c).same_rep(a + (b + c)));
    CHECK((a * (b + c)).same_rep(a * b + a * c));
    CHECK((a * b).same_rep(b * a));
    if (!b.is_zero()) CHECK(((a / b) * b).same_rep(a));
  }
}

TEST_CASE("sign is order compatible and transitive") {
  auto f = golden();
  std::mt19937 rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    auto a = rand_elem(f, rng), b = rand_elem(f, rng), c = rand_elem(f, rng);
    CHECK((a - b).sign() == -(b - a).sign());
    if (a < b && b < c) CHECK(a < c);
  }
  AlgebraicReal zero(f, Rational(0));
  CHECK(zero.sign() == 0);
}

TEST_CASE("to_float brackets the exact value") {
  auto f = golden();
  AlgebraicReal th = AlgebraicReal::theta(f);
  auto [v, eps] = th.to_float(53);
  CHECK(eps <= std::ldexp(2.0, -52));
  // exact value lies within the radius: check via exact rational bounds
  Rational lo_r(v), hi_r(v);
  lo_r -= Rational(eps) + rat(1, 1000000000);
  hi_r += Rational(eps) + rat(1, 1000000000);
  CHECK((th - AlgebraicReal(f, lo_r)).sign() > 0);
  CHECK((th - AlgebraicReal(f, hi_r)).sign() < 0);

  // zero detected symbolically: theta^2 - theta - 1 = 0 exactly
  AlgebraicReal z = th * th - th - AlgebraicReal(f, Rational(1));
  auto [zv, zeps] = z.to_float(53);
  CHECK(zv == 0.0);
  CHECK(zeps == 0.0);

  // rationals round to nearest double
  auto fq = NumberField::rationals();
  AlgebraicReal q(fq, rat(2, 9));
  auto [qv, qe] = q.to_float(53);
  CHECK(qv == doctest::Approx(2.0 / 9.0).epsilon(1e-15));

  std::mt19937 rng(3);
  for (int iter = 0; iter < 30; ++iter) {
    auto a = rand_elem(f, rng);
    auto [av, ae] = a.to_float(40);
    if (a.is_zero()) continue;
    Rational lo(av), hi(av);
    lo -= Rational(ae);
    hi += Rational(ae);
    CHECK((a - AlgebraicReal(f, lo)).sign() >= 0);
    CHECK((a - AlgebraicReal(f, hi)).sign() <= 0);
  }
}

TEST_CASE("division errors") {
  auto f = golden();
  AlgebraicReal one(f, Rational(1)), zero(f, Rational(0));
  CHECK_THROWS_AS(one / zero, Error);
  auto f2 = golden();
  // structurally identical fields are compatible
  CHECK((AlgebraicReal(f, Rational(1)) + AlgebraicReal(f2, Rational(1))).is_rational());
  auto f3 = NumberField::rationals();
  CHECK_THROWS_AS(AlgebraicReal(f, Rational(1)) + AlgebraicReal(f3, Rational(1)), Error);
}
