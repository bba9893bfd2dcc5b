#pragma once

#include <optional>

#include "berkline/berkovich.hpp"

namespace berkline {

enum class CycleClass { repelling, indifferent };

// A periodic orbit of type II points with the tangent data needed to classify
// it: local degrees along the legs and the first-return map at points[0],
// composed leg by leg in the canonical residue coordinates.
struct CycleRecord {
  std::vector<TypeIIPoint> points;
  int period = 0;
  std::vector<int> localDegrees;
  RatFunc firstReturn;
  CycleClass classification = CycleClass::indifferent;
};

// A periodic orbit of type I points with its multiplier (the product of the
// chart derivatives along the orbit).
struct TypeICycle {
  std::vector<ProjPointL> points;
  int period = 0;
  CSeries multiplier;
};

// A fixed Rivera domain described by its boundary cycle and the fixed center
// on the hull of the boundary. fixedBoundaryMultiplicities is filled by
// riveraCountCheck for the iterate it was asked about.
struct RiveraInstance {
  CycleRecord boundary;
  TypeIIPoint center;
  std::vector<std::pair<TypeIIPoint, int>> fixedBoundaryMultiplicities;
};

// Successive images of xi under phi; stops early at the first revisit of an
// earlier point. maxIter <= 64.
std::vector<TangentData> orbitTypeII(const RationalMapL& phi, const TypeIIPoint& xi, int maxIter,
                                     const ToleranceConfig& tol);

// Follows the orbit of seed for up to 2*maxPeriod steps; if it enters a cycle,
// returns the cycle with its first-return tangent map. maxPeriod <= 16.
std::optional<CycleRecord> findCycleTypeII(const RationalMapL& phi, const TypeIIPoint& seed,
                                           int maxPeriod, const ToleranceConfig& tol);

CycleClass classifyTypeIICycle(const CycleRecord& rec);

// The first-return tangent map of a repelling cycle, read as a complex
// rational map in the base point's residue coordinates (at the Gauss point
// these agree with the standard embedding 0, 1, infinity). Throws
// NotRepelling on indifferent cycles.
ComplexRatMap rescalingLimit(const RationalMapL& phi, const CycleRecord& rec,
                             const ToleranceConfig& tol);

// True iff R is Moebius-conjugate to z -> z^deg(R): exactly two distinct
// critical points, each totally ramified and fixed. On success the witness
// sends them to 0 and infinity and absorbs the top coefficient, conjugating R
// to the plain power map.
std::pair<bool, std::optional<RatFunc>> isConjugateToPowerMap(const ComplexRatMap& R,
                                                              const ToleranceConfig& tol);

// Lifts a periodic point of period dividing n from an approximate seed by the
// non-Archimedean Newton iteration on P(z) = N_n(z) - z D_n(z). The residual
// valuation must at least double its gap each step (NewtonDiverged otherwise);
// iteration stops once the residual valuation reaches targetPrec.
TypeICycle newtonLiftPeriodic(const RationalMapL& phi, int n, const ProjPointL& seed,
                              ExpQ targetPrec, const ToleranceConfig& tol, int degreeCap = 81);

// Product of the chart derivatives of phi along the cycle. Bounded iff the
// valuation is >= 0; attracting iff > 0; the limit multiplier is the t^0
// coefficient when the valuation is 0.
CSeries cycleMultiplierL(const RationalMapL& phi, const TypeICycle& cyc,
                         const ToleranceConfig& tol);

struct RiveraCountReport {
  int observed = 0;
  int formula = 0;
  std::vector<std::pair<TypeIIPoint, int>> fixedBoundaryMultiplicities;
};

// Instance check of the fixed-point count in a fixed Rivera domain:
//   N = 2 + sum over boundary points fixed by phi^n of (m - 2),
// where m is the multiplicity of the direction toward the domain as a fixed
// point of the first-return tangent map. Observed counts Newton-lifted fixed
// points of phi^n that lie in the domain (every boundary point must see them
// in the same direction as the center). Throws MembershipUndecidable when a
// lifted point cannot be separated from the boundary at working precision.
RiveraCountReport riveraCountCheck(const RationalMapL& phi, const RiveraInstance& inst, int n,
                                   const std::vector<ProjPointL>& seeds, ExpQ newtonTarget,
                                   const ToleranceConfig& tol, int degreeCap = 81);

// Builds the Rivera instance attached to a boundary cycle: the center is the
// metric midpoint for a 2-cycle and the median branch point for longer ones,
// verified to be fixed under phi.
RiveraInstance riveraInstanceFor(const RationalMapL& phi, const CycleRecord& boundary,
                                 const ToleranceConfig& tol);

// Holes of the q-th iterate: reduceModT(iterateMap(phi, q)).holes.
HoleSet holesOfIterate(const RationalMapL& phi, int q, const ToleranceConfig& tol,
                       int degreeCap = 81);

}  // namespace berkline
