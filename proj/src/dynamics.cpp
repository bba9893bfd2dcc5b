#include "berkline/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace berkline {

namespace {

CSeries lpolyEval(const LPoly& p, const CSeries& z, const ToleranceConfig& tol) {
  CSeries acc = CSeries::zeroTo(exactPrec());
  for (size_t k = p.size(); k-- > 0;) {
    acc = mul(acc, z, tol);
    if (!(p[k].isZero() && p[k].prec() == exactPrec())) acc = add(acc, p[k], tol);
  }
  return acc;
}

}  // namespace

std::vector<TangentData> orbitTypeII(const RationalMapL& phi, const TypeIIPoint& xi, int maxIter,
                                     const ToleranceConfig& tol) {
  if (maxIter < 1 || maxIter > 64) fail(Errc::InvalidArgument, "orbit length must be in [1, 64]");
  std::vector<TangentData> legs;
  std::vector<TypeIIPoint> seen{xi};
  TypeIIPoint cur = xi;
  for (int k = 0; k < maxIter; ++k) {
    TangentData td = imageTypeII(phi, cur, tol);
    legs.push_back(td);
    bool revisit = false;
    for (const auto& p : seen)
      if (td.image.eq(p, tol)) revisit = true;
    if (revisit) break;
    seen.push_back(td.image);
    cur = td.image;
  }
  return legs;
}

std::optional<CycleRecord> findCycleTypeII(const RationalMapL& phi, const TypeIIPoint& seed,
                                           int maxPeriod, const ToleranceConfig& tol) {
  if (maxPeriod < 1 || maxPeriod > 16)
    fail(Errc::InvalidArgument, "maxPeriod must be in [1, 16]");
  std::vector<TypeIIPoint> pts{seed};
  std::vector<TangentData> legs;
  int budget = 2 * maxPeriod;
  for (int k = 0; k < budget; ++k) {
    TangentData td = imageTypeII(phi, pts.back(), tol);
    legs.push_back(td);
    for (size_t i = 0; i < pts.size(); ++i) {
      if (td.image.eq(pts[i], tol)) {
        CycleRecord rec;
        rec.points.assign(pts.begin() + i, pts.end());
        rec.period = int(rec.points.size());
        rec.firstReturn = RatFunc::identity();
        for (size_t j = i; j < legs.size(); ++j) {
          rec.localDegrees.push_back(legs[j].localDegree);
          rec.firstReturn = ratCompose(legs[j].map, rec.firstReturn, tol);
        }
        rec.classification = classifyTypeIICycle(rec);
        return rec;
      }
    }
    pts.push_back(td.image);
  }
  return std::nullopt;
}

CycleClass classifyTypeIICycle(const CycleRecord& rec) {
  return rec.firstReturn.degree() == 1 ? CycleClass::indifferent : CycleClass::repelling;
}

ComplexRatMap rescalingLimit(const RationalMapL& phi, const CycleRecord& rec,
                             const ToleranceConfig& tol) {
  if (rec.classification != CycleClass::repelling)
    fail(Errc::NotRepelling, "rescaling limits exist only along repelling cycles");
  // Cheap consistency check that the record belongs to this map.
  TangentData td = imageTypeII(phi, rec.points[0], tol);
  const TypeIIPoint& expected = rec.points[rec.period > 1 ? 1 : 0];
  if (!td.image.eq(expected, tol))
    fail(Errc::InvalidArgument, "cycle record does not match the map");
  return rec.firstReturn;
}

// --------------------------------------------------------------------------
// Power-map conjugacy
// --------------------------------------------------------------------------

namespace {

// Moebius maps as degree-1 RatFuncs, with (az+b)/(cz+d) inverses.
RatFunc mobius(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d,
               const ToleranceConfig& tol) {
  return ratCancel(Poly({b, a}, tol), Poly({d, c}, tol), tol);
}

RatFunc mobiusInverse(const RatFunc& m, const ToleranceConfig& tol) {
  Scalar a = m.num().coeff(1), b = m.num().coeff(0);
  Scalar c = m.den().coeff(1), d = m.den().coeff(0);
  return mobius(d, -b, -c, a, tol);
}

}  // namespace

std::pair<bool, std::optional<RatFunc>> isConjugateToPowerMap(const ComplexRatMap& R,
                                                              const ToleranceConfig& tol) {
  int d = R.degree();
  if (d < 2) return {false, std::nullopt};
  auto crit = criticalPointsOf(R, tol);
  if (crit.size() != 2) return {false, std::nullopt};
  for (const auto& [c, mult] : crit) {
    if (mult != d - 1) return {false, std::nullopt};
    ExtComplex image = R.eval(c);
    if (!image.eq(c, 1e3 * tol.rootMatch)) return {false, std::nullopt};
  }

  const ExtComplex& c1 = crit[0].first;
  const ExtComplex& c2 = crit[1].first;
  RatFunc M;
  if (c2.isInf())
    M = mobius(Scalar(1.0), -c1.v, Scalar(0.0), Scalar(1.0), tol);  // z - c1
  else if (c1.isInf())
    M = mobius(Scalar(0.0), Scalar(1.0), Scalar(1.0), -c2.v, tol);  // 1/(z - c2)
  else
    M = mobius(Scalar(1.0), -c1.v, Scalar(1.0), -c2.v, tol);  // (z-c1)/(z-c2)

  RatFunc conj = ratCompose(ratCompose(M, R, tol), mobiusInverse(M, tol), tol);
  // conj should be lambda * z^d; absorb lambda by rescaling the witness.
  if (conj.den().degree() != 0 || conj.num().degree() != d) return {false, std::nullopt};
  Scalar lambda = conj.num().leading() / conj.den().leading();
  double noise = 0.0;
  for (int k = 0; k < d; ++k) noise = std::max(noise, std::abs(conj.num().coeff(k)));
  if (noise > 1e-6 * std::abs(lambda)) return {false, std::nullopt};

  Scalar s = std::pow(lambda, 1.0 / double(d - 1));
  RatFunc witness = ratCancel(scale(M.num(), s, tol), M.den(), tol);
  return {true, witness};
}

// --------------------------------------------------------------------------
// Newton lifting of type I periodic points
// --------------------------------------------------------------------------

TypeICycle newtonLiftPeriodic(const RationalMapL& phi, int n, const ProjPointL& seed,
                              ExpQ targetPrec, const ToleranceConfig& tol, int degreeCap) {
  if (n < 1) fail(Errc::InvalidArgument, "period must be >= 1");
  if (seed.isInf()) fail(Errc::InvalidArgument, "seed at infinity: conjugate the map first");
  RationalMapL phin = n == 1 ? phi : iterateMap(phi, n, tol, degreeCap);

  // P(z) = N(z) - z D(z): fixed points of phi^n are its roots, with no
  // spurious poles at the finite critical values.
  LPoly P = phin.num();
  {
    LPoly zD(phin.den().size() + 1, CSeries::zeroTo(exactPrec()));
    for (size_t k = 0; k < phin.den().size(); ++k) zD[k + 1] = phin.den()[k];
    P = lpolyAdd(P, lpolyScale(zD, CSeries::constant(Scalar(-1.0), exactPrec(), tol), tol), tol);
  }
  LPoly dP;
  for (size_t k = 1; k < P.size(); ++k) dP.push_back(scaleSeries(P[k], Scalar(double(k)), tol));

  CSeries z = seed.affineValue(tol);
  CSeries residual = lpolyEval(P, z, tol);
  auto gap = [&](const CSeries& res, const CSeries& at) -> std::optional<ExpQ> {
    CSeries slope = lpolyEval(dP, at, tol);
    if (slope.isZero()) return std::nullopt;
    ExpQ mu = slope.val().v;
    return res.val().bound() - mu - mu;
  };
  auto g0 = gap(residual, z);
  if (!g0 || !(*g0 > ExpQ(0)))
    fail(Errc::NewtonDiverged, "seed outside the Newton basin: val(P) <= 2 val(P')");

  for (int step = 0; step < 64; ++step) {
    if (residual.val().bound() >= targetPrec) break;
    CSeries slope = lpolyEval(dP, z, tol);
    if (slope.isZero()) fail(Errc::NewtonDiverged, "derivative vanished to precision");
    CSeries delta = div(residual, slope, tol);
    CSeries zNext = sub(z, delta, tol);
    CSeries resNext = lpolyEval(P, zNext, tol);
    if (!(resNext.val().bound() > residual.val().bound()))
      fail(Errc::NewtonDiverged, "residual valuation failed to increase");
    z = zNext;
    residual = resNext;
  }
  if (residual.val().bound() < targetPrec)
    fail(Errc::PrecisionExhausted, "working precision below the Newton target");

  TypeICycle cyc;
  cyc.period = n;
  ProjPointL p = ProjPointL::affine(z, tol);
  cyc.points.push_back(p);
  for (int k = 1; k < n; ++k) {
    p = evalMap(phi, p, tol);
    cyc.points.push_back(p);
  }
  cyc.multiplier = cycleMultiplierL(phi, cyc, tol);
  return cyc;
}

CSeries cycleMultiplierL(const RationalMapL& phi, const TypeICycle& cyc,
                         const ToleranceConfig& tol) {
  if (cyc.points.empty()) fail(Errc::InvalidArgument, "empty cycle");
  auto differentiate = [&](const LPoly& p) {
    LPoly d;
    for (size_t k = 1; k < p.size(); ++k) d.push_back(scaleSeries(p[k], Scalar(double(k)), tol));
    return d;
  };
  const LPoly& N = phi.num();
  const LPoly& D = phi.den();
  int deg = phi.degree();
  auto reversedSide = [&](const LPoly& p) {
    LPoly r(deg + 1, CSeries::zeroTo(exactPrec()));
    for (size_t k = 0; k < p.size(); ++k) r[deg - k] = p[k];
    return r;
  };

  CSeries result = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  int q = int(cyc.points.size());
  for (int i = 0; i < q; ++i) {
    const ProjPointL& here = cyc.points[i];
    const ProjPointL& next = cyc.points[(i + 1) % q];
    LPoly a = N, b = D;  // chart at the source
    if (here.isInf()) {
      a = reversedSide(N);
      b = reversedSide(D);
    }
    if (next.isInf()) std::swap(a, b);  // chart 1/w at the image
    // derivative of a/b at the source chart coordinate
    LPoly numd = lpolyAdd(lpolyMul(differentiate(a), b, tol),
                          lpolyScale(lpolyMul(a, differentiate(b), tol),
                                     CSeries::constant(Scalar(-1.0), exactPrec(), tol), tol),
                          tol);
    // Source chart coordinate: z itself, or w = 1/z (= 0) at infinity.
    CSeries coord = here.isInf() ? CSeries::zeroTo(exactPrec()) : here.affineValue(tol);
    CSeries nv = lpolyEval(numd, coord, tol);
    CSeries dv = lpolyEval(lpolyMul(b, b, tol), coord, tol);
    CSeries factor = div(nv, dv, tol);
    result = mul(result, factor, tol);
    if (result.isZero()) return result;  // superattracting: zero to precision
  }
  return result;
}

// --------------------------------------------------------------------------
// Rivera domain instance checks
// --------------------------------------------------------------------------

RiveraInstance riveraInstanceFor(const RationalMapL& phi, const CycleRecord& boundary,
                                 const ToleranceConfig& tol) {
  if (boundary.period < 2) fail(Errc::InvalidArgument, "boundary cycle must have period >= 2");
  RiveraInstance inst;
  inst.boundary = boundary;
  if (boundary.period == 2) {
    ExpQ len = hypDistance(boundary.points[0], boundary.points[1], tol);
    inst.center = pointOnSegment(boundary.points[0], boundary.points[1], ExpQ(len.num(), 2 * len.den()),
                                 tol);
  } else {
    inst.center = medianPoint(boundary.points[0], boundary.points[1], boundary.points[2], tol);
  }
  TangentData td = imageTypeII(phi, inst.center, tol);
  if (!td.image.eq(inst.center, tol))
    fail(Errc::InvalidArgument, "hull center is not fixed: not a fixed Rivera domain");
  return inst;
}

RiveraCountReport riveraCountCheck(const RationalMapL& phi, const RiveraInstance& inst, int n,
                                   const std::vector<ProjPointL>& seeds, ExpQ newtonTarget,
                                   const ToleranceConfig& tol, int degreeCap) {
  RiveraCountReport report;
  const int q = inst.boundary.period;

  // Formula side: boundary points are fixed by phi^n exactly when q | n.
  report.formula = 2;
  if (n % q == 0) {
    for (int j = 0; j < q; ++j) {
      // First-return map of phi^n at boundary point j: recompose the legs
      // starting from j, then take the (n/q)-th iterate of the return map.
      RatFunc ret = RatFunc::identity();
      TypeIIPoint cur = inst.boundary.points[j];
      for (int leg = 0; leg < q; ++leg) {
        TangentData td = imageTypeII(phi, cur, tol);
        ret = ratCompose(td.map, ret, tol);
        cur = td.image;
      }
      RatFunc full = ret;
      for (int k = 1; k < n / q; ++k) full = ratCompose(ret, full, tol);
      Direction towardU = directionOf(inst.boundary.points[j], BerkTarget(inst.center), tol);
      int m = fixedPointMultiplicity(full, towardU.residue, tol);
      report.fixedBoundaryMultiplicities.push_back({inst.boundary.points[j], m});
      report.formula += m - 2;
    }
  }

  // Observed side: lift fixed points of phi^n from the seeds and test
  // membership against every boundary point.
  std::vector<ProjPointL> lifted;
  for (const auto& seed : seeds) {
    TypeICycle cyc = newtonLiftPeriodic(phi, n, seed, newtonTarget, tol, degreeCap);
    const ProjPointL& z = cyc.points[0];
    bool dup = false;
    for (const auto& other : lifted)
      if (z.eq(other, tol)) dup = true;
    if (!dup) lifted.push_back(z);
  }
  for (const auto& z : lifted) {
    bool inside = true;
    for (int j = 0; j < q && inside; ++j) {
      try {
        Direction dz = directionOf(inst.boundary.points[j], BerkTarget(z), tol);
        Direction dc = directionOf(inst.boundary.points[j], BerkTarget(inst.center), tol);
        if (!dz.residue.eq(dc.residue, tol.rootMatch)) inside = false;
      } catch (const Error& e) {
        if (e.code() == Errc::InsufficientPrecision)
          fail(Errc::MembershipUndecidable,
               "lifted point collides with a boundary point at working precision");
        throw;
      }
    }
    if (inside) ++report.observed;
  }
  return report;
}

HoleSet holesOfIterate(const RationalMapL& phi, int q, const ToleranceConfig& tol, int degreeCap) {
  return reduceModT(iterateMap(phi, q, tol, degreeCap), tol).holes;
}

}  // namespace berkline
