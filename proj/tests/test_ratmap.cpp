#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "berkline/families.hpp"
#include "berkline/ratmap.hpp"

using namespace berkline;

namespace {
const ToleranceConfig tol;

RationalMapL exampleD2(const std::vector<Scalar>& g = {}) {
  return exampleMap({2, g}, ExpQ(6), tol);
}

ProjPointL affinePoint(const std::string& s) {
  return ProjPointL::affine(parseSeries(s, tol, exactPrec(), 64), tol);
}
}  // namespace

TEST_CASE("evalMap on the worked family") {
  RationalMapL phi = exampleD2();
  // phi(0) = 1 + t
  auto p0 = evalMap(phi, affinePoint("0"), tol);
  CHECK(approxEqual(p0.affineValue(tol), parseSeries("1 + t", tol), 1e-12));
  // phi(inf) = 1
  auto pinf = evalMap(phi, ProjPointL::infinity(), tol);
  CHECK(approxEqual(pinf.affineValue(tol), parseSeries("1", tol), 1e-12));
  // phi(1) = inf when g = 0 (the denominator vanishes exactly)
  auto p1 = evalMap(phi, affinePoint("1"), tol);
  CHECK(p1.isInf());
}

TEST_CASE("composition and iteration") {
  RationalMapL phi = exampleD2();
  RationalMapL once = iterateMap(phi, 1, tol);
  CHECK(once.degree() == phi.degree());
  RationalMapL twice = iterateMap(phi, 2, tol);
  CHECK(twice.degree() == 4);

  // compose(phi, phi)(z) = phi(phi(z)) at sample type I points
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int k = 0; k < 8; ++k) {
    Scalar c{U(rng), U(rng)};
    ProjPointL z = ProjPointL::affine(CSeries::constant(c, exactPrec(), tol), tol);
    ProjPointL lhs = evalMap(twice, z, tol);
    ProjPointL rhs = evalMap(phi, evalMap(phi, z, tol), tol);
    CHECK(lhs.eq(rhs, tol));
  }
  CHECK_THROWS_AS(iterateMap(phi, 8, tol, 81), Error);  // 2^8 > 81
}

TEST_CASE("derivativeMap") {
  // derivative of z^d is d z^(d-1)
  LPoly num(4, CSeries::zeroTo(exactPrec()));
  num[3] = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  LPoly den{CSeries::constant(Scalar(1.0), exactPrec(), tol)};
  RationalMapL cube = RationalMapL::make(num, den, tol);
  RationalMapL dcube = derivativeMap(cube, tol);
  auto val = evalMap(dcube, affinePoint("2"), tol);
  CHECK(approxEqual(val.affineValue(tol), parseSeries("12", tol), 1e-9));

  // the worked example: phi'(z) = 2tz/(1-z^2)^2 for g = 0
  RationalMapL phi = exampleD2();
  RationalMapL dphi = derivativeMap(phi, tol);
  auto at2 = evalMap(dphi, affinePoint("2"), tol).affineValue(tol);
  // 2t*2/(1-4)^2 = (4/9) t
  CHECK(approxEqual(at2, parseSeries("0.4444444444444444444*t", tol), 1e-9));

  // derivative of a constant map is zero
  LPoly cnum{CSeries::constant(Scalar(5.0), exactPrec(), tol)};
  RationalMapL constant = RationalMapL::make(cnum, den, tol, true);
  RationalMapL dconst = derivativeMap(constant, tol);
  for (const auto& c : dconst.num()) CHECK(c.isZero());
}

TEST_CASE("derivative matches central differences at random points") {
  RationalMapL phi = exampleD2({Scalar(0.3, 0.2)});
  RationalMapL dphi = derivativeMap(phi, tol);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  int checked = 0;
  for (int k = 0; k < 20 && checked < 8; ++k) {
    Scalar c{U(rng), U(rng)};
    if (std::abs(std::abs(c) - 1.0) < 0.2) continue;  // poles of the reduction
    double h = 1e-6;
    auto at = [&](const Scalar& z) {
      return evalMap(phi, ProjPointL::affine(CSeries::constant(z, exactPrec(), tol), tol), tol)
          .affineValue(tol);
    };
    CSeries fd = scaleSeries(sub(at(c + Scalar(h)), at(c - Scalar(h)), tol), Scalar(1.0 / (2 * h)),
                             tol);
    CSeries exact = evalMap(dphi, ProjPointL::affine(CSeries::constant(c, exactPrec(), tol), tol), tol)
                        .affineValue(tol);
    REQUIRE(fd.val().finite);
    REQUIRE(exact.val().finite);
    CHECK(fd.val().v == exact.val().v);
    Scalar lead = fd.terms().front().coef, lead2 = exact.terms().front().coef;
    CHECK(std::abs(lead - lead2) <= 1e-5 * (1.0 + std::abs(lead2)));
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("chain rule on leading coefficients") {
  RationalMapL phi = exampleD2({Scalar(0.4)});
  RationalMapL phi2 = iterateMap(phi, 2, tol);
  RationalMapL dphi = derivativeMap(phi, tol);
  RationalMapL dphi2 = derivativeMap(phi2, tol);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  int checked = 0;
  for (int k = 0; k < 30 && checked < 6; ++k) {
    Scalar c{U(rng), U(rng)};
    if (std::abs(std::abs(c) - 1.0) < 0.25) continue;
    auto pt = [&](const Scalar& z) {
      return ProjPointL::affine(CSeries::constant(z, exactPrec(), tol), tol);
    };
    CSeries image = evalMap(phi, pt(c), tol).affineValue(tol);
    CSeries lhs = evalMap(dphi2, pt(c), tol).affineValue(tol);
    CSeries rhs = mul(evalMap(dphi, pt(c), tol).affineValue(tol), evalAffine(dphi, image, tol), tol);
    REQUIRE(lhs.val().finite);
    REQUIRE(rhs.val().finite);
    CHECK(lhs.val().v == rhs.val().v);
    Scalar a = lhs.terms().front().coef, b = rhs.terms().front().coef;
    CHECK(std::abs(a - b) <= 1e-5 * (1.0 + std::abs(b)));
    ++checked;
  }
  CHECK(checked >= 4);
}

TEST_CASE("reduceModT") {
  // q = 1: numerator and denominator both reduce to 1 - z^2
  RationalMapL phi = exampleD2();
  ReduceResult r1 = reduceModT(phi, tol);
  CHECK(r1.reduced.degree() == 0);
  CHECK(std::abs(r1.reduced.eval(Scalar(0.3)).v - Scalar(1.0)) < 1e-9);
  CHECK(r1.holes.totalMultiplicity() == 2);
  CHECK(r1.holes.multiplicityAt(ExtComplex(Scalar(1.0)), 1e-7) == 1);
  CHECK(r1.holes.multiplicityAt(ExtComplex(Scalar(-1.0)), 1e-7) == 1);

  // q = 2 with a free a1: holes {1,-1}, reduced of degree 2, and the degree identity
  RationalMapL phiA = exampleD2({Scalar(0.7, -0.3)});
  ReduceResult r2 = reduceModT(iterateMap(phiA, 2, tol), tol);
  CHECK(r2.reduced.degree() == 2);
  CHECK(r2.holes.totalMultiplicity() == 4 - 2);
  CHECK(r2.holes.multiplicityAt(ExtComplex(Scalar(1.0)), 1e-7) == 1);
  CHECK(r2.holes.multiplicityAt(ExtComplex(Scalar(-1.0)), 1e-7) == 1);

  // simple map z^2 + t: no holes, reduction z^2
  LPoly num(3, CSeries::zeroTo(exactPrec()));
  num[0] = CSeries::monomial(Scalar(1.0), ExpQ(1), ExpQ(6), tol);
  num[2] = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  LPoly den{CSeries::constant(Scalar(1.0), exactPrec(), tol)};
  RationalMapL simple = RationalMapL::make(num, den, tol);
  ReduceResult r3 = reduceModT(simple, tol);
  CHECK(r3.holes.totalMultiplicity() == 0);
  CHECK(r3.reduced.degree() == 2);
}

TEST_CASE("degree identity for iterates") {
  for (int d : {2, 3}) {
    RationalMapL phi = exampleMap({d, {Scalar(0.4, 0.1)}}, ExpQ(6), tol);
    for (int q : {1, 2}) {
      ReduceResult r = reduceModT(iterateMap(phi, q, tol), tol);
      int dq = 1;
      for (int i = 0; i < q; ++i) dq *= d;
      CHECK(r.reduced.degree() + r.holes.totalMultiplicity() == dq);
    }
  }
}

TEST_CASE("derivative limit of the q=2 iterate (d=2)") {
  // The reduction of the homogenized derivative has root multiset
  // 2*(holes of phi^2) plus the roots of the reduced map's derivative
  // numerator.
  RationalMapL phi = exampleD2({Scalar(0.6, 0.2)});
  RationalMapL phi2 = iterateMap(phi, 2, tol);
  ReduceResult base = reduceModT(phi2, tol);
  RatFunc Gp = ratDerivative(base.reduced, tol);

  RationalMapL dphi2 = derivativeMap(phi2, tol);
  ReduceResult dred = reduceModT(dphi2, tol);

  // Collect the reduction's numerator roots: since reduceModT splits common
  // factors into holes, the full numerator multiset is holes + reduced-num.
  std::vector<std::pair<Scalar, int>> expected;
  auto addRoot = [&](const Scalar& z, int m) {
    for (auto& [r, k] : expected)
      if (std::abs(r - z) < 1e-6) {
        k += m;
        return;
      }
    expected.push_back({z, m});
  };
  for (const auto& [h, m] : base.holes.entries)
    if (!h.isInf()) addRoot(h.v, 2 * m);
  for (const auto& [r, m] : polyRoots(Gp.num(), tol)) addRoot(r, m);

  std::vector<std::pair<Scalar, int>> got;
  for (const auto& [h, m] : dred.holes.entries)
    if (!h.isInf()) got.push_back({h.v, m});
  if (!dred.reduced.num().isZero() && dred.reduced.num().degree() > 0)
    for (const auto& [r, m] : polyRoots(dred.reduced.num(), tol)) got.push_back({r, m});

  for (const auto& [r, m] : expected) {
    int found = 0;
    for (const auto& [z, k] : got)
      if (std::abs(z - r) < 1e-6) found += k;
    CHECK(found == m);
  }
}

TEST_CASE("criticalPointsBicritical") {
  // supported on {z^0, z^d}: critical points 0 and infinity
  RationalMapL phi = exampleD2();
  auto [c1, c2] = criticalPointsBicritical(phi, tol);
  CHECK(c1.affineValue(tol).isZero());
  CHECK(c2.isInf());

  // ((z-1)/(z+1))^2: numerator and denominator are squares of linear factors
  auto lin = [&](double a) {
    std::vector<CSeries::Term> t{{ExpQ(0), Scalar(a)}};
    return CSeries::make(std::move(t), exactPrec(), tol);
  };
  // (z-1)^2 = 1 - 2z + z^2 ; (z+1)^2 = 1 + 2z + z^2
  LPoly num{lin(1.0), lin(-2.0), lin(1.0)};
  LPoly den{lin(1.0), lin(2.0), lin(1.0)};
  RationalMapL moeb = RationalMapL::make(num, den, tol);
  auto [m1, m2] = criticalPointsBicritical(moeb, tol);
  CHECK(approxEqual(m1.affineValue(tol), parseSeries("1", tol), 1e-9));
  CHECK(approxEqual(m2.affineValue(tol), parseSeries("-1", tol), 1e-9));

  // a generic non-bicritical shape is rejected
  LPoly bad{lin(1.0), lin(1.0), lin(1.0)};
  RationalMapL notB = RationalMapL::make(bad, den, tol);
  CHECK_THROWS_AS(criticalPointsBicritical(notB, tol), Error);
}

TEST_CASE("ratmap literal round trip") {
  RationalMapL phi = exampleD2({Scalar(0.25, 0.5)});
  std::string lit = printRatMapLiteral(phi);
  RationalMapL back = parseRatMapLiteral(lit, tol);
  CHECK(back.degree() == phi.degree());
  for (int k = 0; k <= phi.degree(); ++k) {
    CHECK(approxEqual(back.num()[k], phi.num()[k], 1e-12));
    CHECK(approxEqual(back.den()[k], phi.den()[k], 1e-12));
  }
}
