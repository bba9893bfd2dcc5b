#include "berkline/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace berkline {

const char* cycleKindName(CycleKind k) {
  switch (k) {
    case CycleKind::superattracting: return "superattracting";
    case CycleKind::attracting: return "attracting";
    case CycleKind::repelling: return "repelling";
    case CycleKind::rationallyIndifferent: return "rationallyIndifferent";
    case CycleKind::irrationallyIndifferent: return "irrationallyIndifferent";
  }
  return "?";
}

CycleKind classifyMultiplier(const Scalar& lambda) {
  double m = std::abs(lambda);
  if (m <= 1e-8) return CycleKind::superattracting;
  if (m < 1.0 - 1e-6) return CycleKind::attracting;
  if (std::abs(m - 1.0) <= 1e-6) {
    for (int q = 1; q <= 12; ++q)
      for (int p = 0; p < q; ++p) {
        Scalar root = std::polar(1.0, 2.0 * M_PI * double(p) / double(q));
        if (std::abs(lambda - root) <= 1e-6) return CycleKind::rationallyIndifferent;
      }
    return CycleKind::irrationallyIndifferent;
  }
  return CycleKind::repelling;
}

namespace {

double chordal(const ExtComplex& a, const ExtComplex& b) {
  if (a.isInf() && b.isInf()) return 0.0;
  if (a.isInf()) return 2.0 / std::sqrt(1.0 + std::norm(b.v));
  if (b.isInf()) return 2.0 / std::sqrt(1.0 + std::norm(a.v));
  return 2.0 * std::abs(a.v - b.v) / std::sqrt((1.0 + std::norm(a.v)) * (1.0 + std::norm(b.v)));
}

Poly reversedBy(const Poly& p, int deg, const ToleranceConfig& tol) { return p.reversed(deg, tol); }

}  // namespace

Scalar chartDerivative(const ComplexRatMap& f, const ExtComplex& here, const ExtComplex& next,
                       const ToleranceConfig& tol) {
  int d = f.degree();
  Poly a = f.num(), b = f.den();
  if (here.isInf()) {
    a = reversedBy(f.num(), d, tol);
    b = reversedBy(f.den(), d, tol);
  }
  if (next.isInf()) std::swap(a, b);
  Poly numd = sub(mul(a.derivative(), b, tol), mul(a, b.derivative(), tol), tol);
  Scalar z = here.isInf() ? Scalar(0.0) : here.v;
  Scalar den = b.eval(z);
  return numd.eval(z) / (den * den);
}

std::vector<ComplexCycle> cyclesOfComplexMap(const ComplexRatMap& f, int n,
                                             const ToleranceConfig& tol, int degreeCap) {
  if (n < 1) fail(Errc::InvalidArgument, "period must be >= 1");
  int d = f.degree();
  double dn = std::pow(double(d), double(n));
  if (dn > double(degreeCap))
    fail(Errc::DegreeCapExceeded, "root solve degree exceeds cap");

  ComplexRatMap fn = f;
  for (int k = 1; k < n; ++k) fn = ratCompose(f, fn, tol);

  // Fixed-point divisor of f^n: roots of N(z) - z D(z), plus infinity with
  // the complementary multiplicity.
  Poly P = sub(fn.num(), shift(fn.den(), 1), tol);
  std::vector<std::pair<ExtComplex, int>> fixed;
  int finiteCount = 0;
  if (!P.isZero()) {
    for (const auto& [r, m] : polyRoots(P, tol)) {
      fixed.push_back({ExtComplex(r), m});
      finiteCount += m;
    }
  }
  int infMult = int(dn) + 1 - finiteCount;
  if (infMult > 0) fixed.push_back({ExtComplex::infinity(), infMult});

  // Group the fixed points of f^n into orbits of f.
  auto nearestIdx = [&](const ExtComplex& z) {
    size_t best = fixed.size();
    double bestD = 1e9;
    for (size_t i = 0; i < fixed.size(); ++i) {
      double dd = chordal(fixed[i].first, z);
      if (dd < bestD) {
        bestD = dd;
        best = i;
      }
    }
    return std::pair<size_t, double>{best, bestD};
  };

  std::vector<bool> used(fixed.size(), false);
  std::vector<ComplexCycle> out;
  for (size_t i = 0; i < fixed.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    ComplexCycle cyc;
    cyc.points.push_back(fixed[i].first);
    ExtComplex z = fixed[i].first;
    for (int step = 1; step < n; ++step) {
      z = f.eval(z);
      if (chordal(z, fixed[i].first) <= 1e-7) break;  // exact period found
      auto [j, dist] = nearestIdx(z);
      if (j < fixed.size() && dist <= 1e-5) {
        used[j] = true;
        z = fixed[j].first;  // snap onto the root for accuracy
      }
      cyc.points.push_back(z);
    }
    cyc.period = int(cyc.points.size());
    Scalar lambda(1.0);
    for (int k = 0; k < cyc.period; ++k)
      lambda *= chartDerivative(f, cyc.points[k], cyc.points[(k + 1) % cyc.period], tol);
    cyc.multiplier = lambda;
    cyc.kind = classifyMultiplier(lambda);
    out.push_back(std::move(cyc));
  }
  return out;
}

FsiReport nonrepellingCensus(const ComplexRatMap& f, int maxPeriod, const ToleranceConfig& tol) {
  if (maxPeriod < 1 || maxPeriod > 6) fail(Errc::InvalidArgument, "maxPeriod must be in [1, 6]");
  int d = f.degree();
  FsiReport rep;
  rep.bound = 2 * d - 2;

  auto sameCycle = [&](const ComplexCycle& a, const ComplexCycle& b) {
    if (a.period != b.period) return false;
    for (const auto& p : a.points) {
      bool found = false;
      for (const auto& q : b.points)
        if (chordal(p, q) <= 1e-6) found = true;
      if (!found) return false;
    }
    return true;
  };

  for (int n = 1; n <= maxPeriod; ++n) {
    for (auto& cyc : cyclesOfComplexMap(f, n, tol)) {
      if (cyc.period != n) continue;  // counted at its exact period
      bool dup = false;
      for (const auto& known : rep.cycles)
        if (sameCycle(cyc, known)) dup = true;
      if (!dup) rep.cycles.push_back(std::move(cyc));
    }
  }

  for (const auto& cyc : rep.cycles) {
    if (cyc.kind != CycleKind::repelling && !cyc.containsInfinity()) ++rep.nonrepellingCount;
    if (cyc.kind == CycleKind::attracting || cyc.kind == CycleKind::irrationallyIndifferent)
      ++rep.gammaLower;
  }
  rep.flagged = rep.nonrepellingCount > rep.bound;

  // Critical orbits: only an orbit that lands exactly (in floating point) on
  // a periodic cycle is provably preperiodic; an orbit that merely contracts
  // toward an attracting cycle has an infinite tail and is counted.
  for (const auto& [c, mult] : criticalPointsOf(f, tol)) {
    std::vector<ExtComplex> orbit{c};
    bool preperiodic = false;
    for (int k = 0; k < 200 && !preperiodic; ++k) {
      ExtComplex z = f.eval(orbit.back());
      for (size_t j = 0; j + 1 < orbit.size() + 1; ++j) {
        if (chordal(z, orbit[j]) == 0.0) {
          // probe one more period to rule out a transient coincidence
          size_t p = orbit.size() - j;
          ExtComplex w = z;
          for (size_t s = 0; s < p; ++s) w = f.eval(w);
          if (chordal(w, z) == 0.0) {
            preperiodic = true;
            break;
          }
        }
      }
      orbit.push_back(z);
    }
    if (!preperiodic) ++rep.deltaUpper;
  }
  return rep;
}

// --------------------------------------------------------------------------
// Attracting multiplier pair of a bicritical map
// --------------------------------------------------------------------------

namespace {

struct OrbitLimit {
  bool found = false;
  std::vector<ExtComplex> cycle;
  Scalar multiplier{0.0};
  int period = 0;
};

OrbitLimit detectAttractor(const ComplexRatMap& f, const ExtComplex& start, int maxPeriod,
                           const ToleranceConfig& tol) {
  constexpr int kMaxSteps = 10000;
  constexpr int kWindow = 500;
  std::vector<ExtComplex> orbit{start};
  orbit.reserve(kMaxSteps + 1);
  OrbitLimit res;
  for (int k = 0; k < kMaxSteps; ++k) {
    orbit.push_back(f.eval(orbit.back()));
    size_t N = orbit.size();
    if (int(N) >= kWindow + maxPeriod && k % 50 == 0) {
      for (int p = 1; p <= maxPeriod && !res.found; ++p) {
        bool stable = true;
        for (size_t j = N - kWindow; j + p < N && stable; ++j)
          if (chordal(orbit[j], orbit[j + p]) > 1e-10) stable = false;
        if (stable) {
          res.found = true;
          res.period = p;
          for (int i = 0; i < p; ++i) res.cycle.push_back(orbit[N - p + i]);
        }
      }
      if (res.found) break;
    }
  }
  if (!res.found) return res;
  // The stability window can trigger on a multiple of the exact period.
  for (int p = 1; p < res.period; ++p)
    if (res.period % p == 0 && chordal(res.cycle[0], res.cycle[p]) <= 1e-8) {
      res.cycle.resize(p);
      res.period = p;
      break;
    }
  Scalar lambda(1.0);
  for (int i = 0; i < res.period; ++i)
    lambda *= chartDerivative(f, res.cycle[i], res.cycle[(i + 1) % res.period], tol);
  res.multiplier = lambda;
  if (std::abs(lambda) >= 1.0) res.found = false;  // not attracting after all
  return res;
}

}  // namespace

std::optional<MultiplierPair> multiplierPair(const ComplexRatMap& f, int maxPeriod,
                                             const ToleranceConfig& tol, int minPeriod) {
  OrbitLimit a = detectAttractor(f, ExtComplex(Scalar(0.0)), maxPeriod, tol);
  OrbitLimit b = detectAttractor(f, ExtComplex::infinity(), maxPeriod, tol);
  if (!a.found || !b.found) return std::nullopt;
  if (a.period < minPeriod || b.period < minPeriod) return std::nullopt;
  // The two attractors must be distinct cycles.
  bool shared = false;
  for (const auto& p : a.cycle)
    for (const auto& q : b.cycle)
      if (chordal(p, q) <= 1e-7) shared = true;
  if (shared) return std::nullopt;
  return MultiplierPair{a.multiplier, b.multiplier, a.period, b.period};
}

std::pair<Scalar, Scalar> moduliCoordinates(const ComplexRatMap& f, const ToleranceConfig& tol) {
  int d = f.degree();
  Poly P = sub(f.num(), shift(f.den(), 1), tol);
  std::vector<Scalar> lambdas;
  if (!P.isZero()) {
    for (const auto& [r, m] : polyRoots(P, tol)) {
      Scalar lam = chartDerivative(f, ExtComplex(r), f.eval(r), tol);
      for (int k = 0; k < m; ++k) lambdas.push_back(m >= 2 ? Scalar(1.0) : lam);
    }
  }
  int infMult = d + 1 - int(lambdas.size());
  if (infMult > 0) {
    Scalar lam = chartDerivative(f, ExtComplex::infinity(), f.evalAtInf(), tol);
    for (int k = 0; k < infMult; ++k) lambdas.push_back(infMult >= 2 ? Scalar(1.0) : lam);
  }
  if (int(lambdas.size()) != d + 1)
    fail(Errc::NoConvergence, "fixed points with multiplicity did not sum to d+1");

  // Elementary symmetric functions from prod (x + lambda_i).
  std::vector<Scalar> e(lambdas.size() + 1, Scalar(0.0));
  e[0] = Scalar(1.0);
  for (const auto& lam : lambdas)
    for (size_t k = e.size() - 1; k >= 1; --k) e[k] += lam * e[k - 1];
  return {e[1], e[d]};
}

RescaleTable crossValidateRescaling(const RationalMapL& family, const ConjugacyCurve& curve, int q,
                                    const ComplexRatMap& g, const std::vector<double>& tList,
                                    const std::vector<Scalar>& zList, const ToleranceConfig& tol,
                                    int degreeCap) {
  // Holes of the limit come from the reduction of the conjugated iterate.
  CSeries one = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  CSeries tr = CSeries::monomial(Scalar(1.0), curve.r, exactPrec(), tol);
  RationalMapL M = RationalMapL::make({curve.a, tr}, {one}, tol);
  RationalMapL Minv = RationalMapL::make({neg(curve.a), one}, {tr}, tol);
  RationalMapL conj =
      composeMaps(Minv, composeMaps(iterateMap(family, q, tol, degreeCap), M, tol, degreeCap), tol,
                  degreeCap);
  HoleSet holes = reduceModT(conj, tol).holes;
  for (const auto& z : zList) {
    for (const auto& [h, m] : holes.entries) {
      if (h.isInf()) {
        if (std::abs(z) > 10.0) fail(Errc::HoleProximity, "sample point too close to infinity");
      } else if (std::abs(z - h.v) < 0.1) {
        fail(Errc::HoleProximity,
             "sample point " + formatComplex(z, 6) + " within 0.1 of hole " + formatComplex(h.v, 6));
      }
    }
  }

  RescaleTable table;
  for (double t : tList) {
    ComplexRatMap ft = instantiateAt(family, Scalar(t), tol);
    double tr_num = std::pow(t, curve.r.toDouble());
    Scalar aat = evalSeriesNumeric(curve.a, Scalar(t));
    double sup = 0.0;
    for (const auto& z : zList) {
      ExtComplex w(aat + tr_num * z);
      for (int k = 0; k < q; ++k) w = ft.eval(w);
      double err;
      ExtComplex limit = g.eval(z);
      if (w.isInf() || limit.isInf()) {
        err = (w.isInf() && limit.isInf()) ? 0.0 : 1e18;
      } else {
        err = std::abs((w.v - aat) / tr_num - limit.v);
      }
      sup = std::max(sup, err);
    }
    table.rows.push_back({t, sup});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const RescaleRow& a, const RescaleRow& b) { return a.t > b.t; });
  table.decreasing = true;
  for (size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i].supError < table.rows[i - 1].supError)) table.decreasing = false;
  return table;
}

}  // namespace berkline
