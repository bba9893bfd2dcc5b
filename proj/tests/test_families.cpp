#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "berkline/families.hpp"

using namespace berkline;

namespace {
const ToleranceConfig tol;
}

TEST_CASE("milnorMap coefficients at the base point") {
  // (u,v) = (0,0): (A,B,C,D) = (2,-1,1,0) and f(1) = 1
  ComplexRatMap f = milnorMap(Scalar(0.0), Scalar(0.0), 2, tol);
  CHECK(f.num().coeff(2) == Scalar(2.0));
  CHECK(f.num().coeff(0) == Scalar(-1.0));
  CHECK(f.den().coeff(2) == Scalar(1.0));
  CHECK(f.den().coeff(0) == Scalar(0.0));
  ExtComplex f1 = f.eval(Scalar(1.0));
  REQUIRE(!f1.isInf());
  CHECK(std::abs(f1.v - Scalar(1.0)) < 1e-12);
}

TEST_CASE("milnor determinant identity over 100 random parameters") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  int tested = 0;
  while (tested < 100) {
    Scalar u{U(rng), U(rng)}, v{U(rng), U(rng)};
    if (std::abs(v + 1.0) < 0.05 || std::abs(u + v + 1.0) < 0.05) continue;
    for (int d : {2, 3}) {
      ComplexRatMap f = milnorMap(u, v, d, tol);
      Scalar A = f.num().coeff(d), B = f.num().coeff(0);
      Scalar C = f.den().coeff(d), D = f.den().coeff(0);
      Scalar det = A * D - B * C;
      Scalar expect = (v + 1.0) * (v + 1.0) * (u + v + 1.0) * (u + v + 1.0);
      CHECK(std::abs(det - expect) <= 1e-9 * (1.0 + std::abs(expect)));
      // fixed point at 1
      ExtComplex f1 = f.eval(Scalar(1.0));
      REQUIRE(!f1.isInf());
      CHECK(std::abs(f1.v - Scalar(1.0)) <= 1e-9);
      // critical points 0 and infinity
      auto crit = criticalPointsOf(f, tol);
      REQUIRE(crit.size() == 2);
      bool zero = false, inf = false;
      for (const auto& [c, m] : crit) {
        if (c.isInf() && m == d - 1) inf = true;
        if (!c.isInf() && std::abs(c.v) < 1e-8 && m == d - 1) zero = true;
      }
      CHECK(zero);
      CHECK(inf);
    }
    ++tested;
  }
}

TEST_CASE("milnorMap rejects the degeneracy locus") {
  CHECK_THROWS_AS(milnorMap(Scalar(0.5), Scalar(-1.0), 2, tol), Error);
  CHECK_THROWS_AS(milnorMap(Scalar(1.0), Scalar(-2.0), 2, tol), Error);  // u+v+1 = 0
}

TEST_CASE("milnorMap over the series field and critical points") {
  CSeries u = parseSeries("t", tol), v = parseSeries("2 + t", tol);
  RationalMapL f = milnorMap(u, v, 2, tol);
  auto [c1, c2] = criticalPointsBicritical(f, tol);
  CHECK(c1.affineValue(tol).isZero());
  CHECK(c2.isInf());
  // f(1) = 1 exactly as series
  ProjPointL one = ProjPointL::affine(parseSeries("1", tol).asExact(), tol);
  CHECK(evalMap(f, one, tol).eq(one, tol));
}

TEST_CASE("degeneracyCheck") {
  CSeries u = parseSeries("t", tol);
  CSeries vm1 = parseSeries("-1 + t", tol);
  CHECK(degeneracyCheck(u, vm1, tol) == DegeneracyClass::vLine);

  CSeries uinf = parseSeries("t^-1", tol);
  CHECK(degeneracyCheck(uinf, u, tol) == DegeneracyClass::lineAtInfinity);

  CHECK(degeneracyCheck(u, u, tol) == DegeneracyClass::none);

  // u + v + 1 -> 0
  CSeries v2 = parseSeries("-1 - t + t^2", tol);
  CHECK(degeneracyCheck(u, v2, tol) == DegeneracyClass::uvLine);
}

TEST_CASE("exampleMap basics") {
  RationalMapL phi = exampleMap({2, {}}, ExpQ(6), tol);
  ProjPointL x1 = evalMap(phi, ProjPointL::affine(CSeries::zeroTo(ExpQ(6)), tol), tol);
  CHECK(approxEqual(x1.affineValue(tol), parseSeries("1 + t", tol), 1e-12));
  CHECK_THROWS_AS(exampleMap({7, {}}, ExpQ(6), tol), Error);
}

TEST_CASE("the 2-cycle is robust over random g and degrees") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int d = 2; d <= 5; ++d) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Scalar> g{Scalar(U(rng), U(rng)), Scalar(U(rng), U(rng)),
                            Scalar(U(rng), U(rng))};
      RationalMapL phi = exampleMap({d, g}, ExpQ(6), tol);
      auto cyc = findCycleTypeII(phi, TypeIIPoint::gauss(), 4, tol);
      REQUIRE(cyc.has_value());
      CHECK(cyc->period == 2);
      CHECK(cyc->points[1].eq(
          TypeIIPoint::make(parseSeries("1", tol, exactPrec(), 64), ExpQ(1), tol), tol));
    }
  }
}

TEST_CASE("solveExampleCoefficients d=2") {
  auto sols = solveExampleCoefficients(2, ExpQ(6), tol);
  REQUIRE(!sols.empty());
  // the single hole branch: a1 = 3/2, a2 = -27/16, and the extra direction
  // coefficient a3 forced at radius 1
  const auto& g = sols[0].gCoeffs;
  REQUIRE(g.size() == 3);
  CHECK(std::abs(g[0] - Scalar(1.5)) < 1e-9);
  CHECK(std::abs(g[1] - Scalar(-1.6875)) < 1e-9);
  CHECK(std::abs(g[2] - Scalar(4.2734375)) < 1e-9);
  CHECK(verifyExamplePair(sols[0], ExpQ(6), tol));
}

TEST_CASE("solveExampleCoefficients d=3 reproduces the published pair") {
  auto sols = solveExampleCoefficients(3, ExpQ(6), tol);
  REQUIRE(sols.size() == 2);  // one branch per nontrivial cube root of unity
  double s3 = std::sqrt(3.0);
  Scalar pa1 = Scalar(7.0, 3.0 * s3) / Scalar(3.0, s3);
  Scalar pa2 = Scalar(-2.0) * Scalar(49.0, 25.0 * s3) / (Scalar(9.0) * Scalar(3.0, s3));
  bool matched = false;
  for (const auto& p : sols) {
    REQUIRE(p.gCoeffs.size() == 2);
    if (std::abs(p.gCoeffs[0] - pa1) < 1e-8 && std::abs(p.gCoeffs[1] - pa2) < 1e-8) matched = true;
  }
  CHECK(matched);
  // and the published values themselves pass the full verification
  CHECK(verifyExamplePair({3, {pa1, pa2}}, ExpQ(6), tol));
}

TEST_CASE("solver output is stable under doubling the working precision") {
  for (int d : {2, 3}) {
    auto lo = solveExampleCoefficients(d, ExpQ(6), tol);
    auto hi = solveExampleCoefficients(d, ExpQ(12), tol);
    REQUIRE(lo.size() == hi.size());
    for (const auto& a : lo) {
      bool found = false;
      for (const auto& b : hi) {
        if (a.gCoeffs.size() != b.gCoeffs.size()) continue;
        bool same = true;
        for (size_t i = 0; i < a.gCoeffs.size(); ++i)
          if (std::abs(a.gCoeffs[i] - b.gCoeffs[i]) > 1e-8) same = false;
        found = found || same;
      }
      CHECK(found);
    }
  }
}
