#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "berkline/algebra.hpp"

using namespace berkline;

namespace {
const ToleranceConfig tol;

Scalar randScalar(std::mt19937_64& rng, double box = 2.0) {
  std::uniform_real_distribution<double> U(-box, box);
  return {U(rng), U(rng)};
}

bool hasRoot(const std::vector<std::pair<Scalar, int>>& roots, const Scalar& r, int m,
             double eps = 1e-6) {
  for (const auto& [z, k] : roots)
    if (std::abs(z - r) <= eps && k == m) return true;
  return false;
}
}  // namespace

TEST_CASE("complex literal parsing and printing") {
  CHECK(parseComplex("3") == Scalar(3.0, 0.0));
  CHECK(parseComplex("2i") == Scalar(0.0, 2.0));
  CHECK(parseComplex("1+2i") == Scalar(1.0, 2.0));
  CHECK(parseComplex("1.5-0.25i") == Scalar(1.5, -0.25));
  CHECK(parseComplex("(2.5+0.2886751i)") == Scalar(2.5, 0.2886751));
  CHECK(parseComplex("-i") == Scalar(0.0, -1.0));
  CHECK_THROWS_AS(parseComplex("1+"), Error);

  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    Scalar z = randScalar(rng, 10.0);
    CHECK(parseComplex(formatComplex(z)) == z);  // 17 digits round-trip exactly
  }
}

TEST_CASE("polyRoots on factored examples") {
  // z^2 - 1
  Poly p({Scalar(-1), Scalar(0), Scalar(1)}, tol);
  auto r = polyRoots(p, tol);
  REQUIRE(r.size() == 2);
  CHECK(hasRoot(r, Scalar(1.0), 1));
  CHECK(hasRoot(r, Scalar(-1.0), 1));

  // z (z-1)^2
  Poly q({Scalar(0), Scalar(1), Scalar(-2), Scalar(1)}, tol);
  auto r2 = polyRoots(q, tol);
  REQUIRE(r2.size() == 2);
  CHECK(hasRoot(r2, Scalar(0.0), 1));
  CHECK(hasRoot(r2, Scalar(1.0), 2));

  CHECK_THROWS_AS(polyRoots(Poly::zero(), tol), Error);
}

TEST_CASE("polyRoots round trip through expansion") {
  // expand prod_{k=1..5} (z-k), then re-root
  std::vector<std::pair<Scalar, int>> roots;
  for (int k = 1; k <= 5; ++k) roots.push_back({Scalar(double(k)), 1});
  Poly p = Poly::fromRoots(roots, Scalar(1.0));
  auto r = polyRoots(p, tol);
  REQUIRE(r.size() == 5);
  for (int k = 1; k <= 5; ++k) CHECK(hasRoot(r, Scalar(double(k)), 1, 1e-6));
}

TEST_CASE("polyRoots multiplicity sum and reconstruction") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> nRoots(1, 4), mult(1, 3);
    std::vector<std::pair<Scalar, int>> roots;
    int deg = 0;
    for (int i = 0, n = nRoots(rng); i < n; ++i) {
      roots.push_back({randScalar(rng), mult(rng)});
      deg += roots.back().second;
    }
    Scalar lead = randScalar(rng) + Scalar(3.0);
    Poly p = Poly::fromRoots(roots, lead);
    auto found = polyRoots(p, tol);
    int total = 0;
    for (const auto& [z, m] : found) total += m;
    CHECK(total == deg);
    // reconstruction matches the monic normalization coefficientwise
    Poly rebuilt = Poly::fromRoots(found, Scalar(1.0));
    Poly monic = scale(p, Scalar(1.0) / lead, tol);
    CHECK(approxEqual(rebuilt, monic, 1e-5));
  }
}

TEST_CASE("polyRoots handles heavy multiplicities") {
  // (z^3 - 1)^3: three triple roots at the cube roots of unity
  std::vector<std::pair<Scalar, int>> cube;
  for (int k = 0; k < 3; ++k) cube.push_back({std::polar(1.0, 2.0 * M_PI * k / 3.0), 3});
  Poly p = Poly::fromRoots(cube, Scalar(1.0));
  auto r = polyRoots(p, tol);
  REQUIRE(r.size() == 3);
  for (const auto& [z, m] : r) CHECK(m == 3);
}

TEST_CASE("ratCancel") {
  // (z^2 - 1)/(z - 1) -> z + 1
  RatFunc f = ratCancel(Poly({Scalar(-1), Scalar(0), Scalar(1)}, tol),
                        Poly({Scalar(-1), Scalar(1)}, tol), tol);
  CHECK(f.den().degree() == 0);
  CHECK(std::abs(f.num().coeff(0) - Scalar(1.0)) < 1e-9);
  CHECK(std::abs(f.num().coeff(1) - Scalar(1.0)) < 1e-9);

  // coprime pair unchanged up to monic normalization
  RatFunc g = ratCancel(Poly({Scalar(2), Scalar(1)}, tol), Poly({Scalar(-3), Scalar(1)}, tol), tol);
  CHECK(g.num().degree() == 1);
  CHECK(g.den().degree() == 1);

  // near-common root merged within rootMatch
  RatFunc h = ratCancel(Poly({Scalar(-(1.0 + 1e-9)), Scalar(0), Scalar(1)}, tol),
                        Poly({Scalar(-1), Scalar(1)}, tol), tol);
  CHECK(h.den().degree() == 0);
  CHECK(h.num().degree() == 1);

  CHECK_THROWS_AS(ratCancel(Poly::one(), Poly::zero(), tol), Error);
}

TEST_CASE("ratCancel agrees with the uncanceled quotient at sample points") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<Scalar, int>> shared, nOnly, dOnly;
    shared.push_back({randScalar(rng), 1});
    nOnly.push_back({randScalar(rng), 1});
    dOnly.push_back({randScalar(rng), 1});
    Poly num = Poly::fromRoots({shared[0], nOnly[0]}, randScalar(rng) + Scalar(2.0));
    Poly den = Poly::fromRoots({shared[0], dOnly[0]}, randScalar(rng) + Scalar(2.0));
    RatFunc f = ratCancel(num, den, tol);
    for (int s = 0; s < 20; ++s) {
      Scalar z = randScalar(rng, 3.0);
      Scalar dv = den.eval(z);
      if (std::abs(dv) < 1e-3) continue;  // stay away from the pole
      Scalar expect = num.eval(z) / dv;
      ExtComplex got = f.eval(z);
      REQUIRE(!got.isInf());
      CHECK(std::abs(got.v - expect) <= 1e-6 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("ratCompose") {
  // outer w -> 1 - 1/(2w), inner u -> 1/(1-u^2) gives (u^2+1)/2
  RatFunc outer = ratCancel(Poly({Scalar(-1), Scalar(2)}, tol), Poly({Scalar(0), Scalar(2)}, tol), tol);
  RatFunc inner = ratCancel(Poly({Scalar(1)}, tol), Poly({Scalar(1), Scalar(0), Scalar(-1)}, tol), tol);
  RatFunc comp = ratCompose(outer, inner, tol);
  CHECK(comp.den().degree() == 0);
  CHECK(std::abs(comp.num().coeff(0) - Scalar(0.5)) < 1e-12);
  CHECK(std::abs(comp.num().coeff(2) - Scalar(0.5)) < 1e-12);

  // identity composition
  RatFunc R = ratCancel(Poly({Scalar(1), Scalar(2), Scalar(3)}, tol),
                        Poly({Scalar(4), Scalar(1)}, tol), tol);
  RatFunc idComp = ratCompose(RatFunc::identity(), R, tol);
  CHECK(approxEqual(idComp.num(), R.num(), 1e-9));
  CHECK(approxEqual(idComp.den(), R.den(), 1e-9));

  // u -> u^2 after u -> u+1 gives (u+1)^2
  RatFunc sq = RatFunc::raw(Poly({Scalar(0), Scalar(0), Scalar(1)}, tol), Poly::one());
  RatFunc shiftOne = RatFunc::raw(Poly({Scalar(1), Scalar(1)}, tol), Poly::one());
  RatFunc binom = ratCompose(sq, shiftOne, tol);
  CHECK(std::abs(binom.num().coeff(0) - Scalar(1.0)) < 1e-12);
  CHECK(std::abs(binom.num().coeff(1) - Scalar(2.0)) < 1e-12);
  CHECK(std::abs(binom.num().coeff(2) - Scalar(1.0)) < 1e-12);
}

TEST_CASE("ratCompose associativity at sample points") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    auto randRF = [&] {
      Poly n({randScalar(rng), randScalar(rng), randScalar(rng)}, tol);
      Poly d({randScalar(rng) + Scalar(1.5), randScalar(rng)}, tol);
      return ratCancel(n, d, tol);
    };
    RatFunc A = randRF(), B = randRF(), C = randRF();
    RatFunc left = ratCompose(ratCompose(A, B, tol), C, tol);
    RatFunc right = ratCompose(A, ratCompose(B, C, tol), tol);
    for (int s = 0; s < 10; ++s) {
      Scalar z = randScalar(rng, 2.0);
      ExtComplex l = left.eval(z), r = right.eval(z);
      if (l.isInf() || r.isInf()) {
        CHECK(l.isInf() == r.isInf());
        continue;
      }
      CHECK(std::abs(l.v - r.v) <= 1e-6 * (1.0 + std::abs(r.v)));
    }
  }
}

TEST_CASE("fixed point multiplicity and critical points") {
  // u -> u^2: fixed points 0 (simple), 1 (simple), infinity
  RatFunc sq = RatFunc::raw(Poly({Scalar(0), Scalar(0), Scalar(1)}, tol), Poly::one());
  CHECK(fixedPointMultiplicity(sq, ExtComplex(Scalar(0.0)), tol) == 1);
  CHECK(fixedPointMultiplicity(sq, ExtComplex(Scalar(1.0)), tol) == 1);
  CHECK(fixedPointMultiplicity(sq, ExtComplex(Scalar(0.5)), tol) == 0);

  // G for the d=2 family with a1=0: (z^2+1)/2 has a double fixed point at 1
  RatFunc G = RatFunc::raw(Poly({Scalar(0.5), Scalar(0), Scalar(0.5)}, tol), Poly::one());
  CHECK(fixedPointMultiplicity(G, ExtComplex(Scalar(1.0)), tol) == 2);

  auto crit = criticalPointsOf(G, tol);
  REQUIRE(crit.size() == 2);
  int total = 0;
  for (const auto& [c, m] : crit) total += m;
  CHECK(total == 2);  // 2d - 2
}

TEST_CASE("evaluation at poles and infinity") {
  RatFunc f = ratCancel(Poly({Scalar(1)}, tol), Poly({Scalar(-1), Scalar(1)}, tol), tol);  // 1/(z-1)
  CHECK(f.eval(Scalar(1.0)).isInf());
  CHECK(!f.eval(Scalar(2.0)).isInf());
  CHECK(f.evalAtInf().eq(ExtComplex(Scalar(0.0)), 1e-12));
  RatFunc poly = RatFunc::raw(Poly({Scalar(0), Scalar(0), Scalar(1)}, tol), Poly::one());
  CHECK(poly.evalAtInf().isInf());
}
