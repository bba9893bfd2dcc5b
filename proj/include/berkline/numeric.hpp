#pragma once

#include "berkline/ratmap.hpp"

namespace berkline {

enum class CycleKind {
  superattracting,
  attracting,
  repelling,
  rationallyIndifferent,
  irrationallyIndifferent,
};
const char* cycleKindName(CycleKind k);

// A periodic orbit of a complex rational map with its multiplier. The
// classification thresholds are fixed: |lambda| <= 1e-8 superattracting,
// |lambda| < 1 - 1e-6 attracting, within 1e-6 of the unit circle indifferent
// (rational when within 1e-6 of a root of unity of order <= 12), repelling
// otherwise.
struct ComplexCycle {
  std::vector<ExtComplex> points;
  int period = 0;
  Scalar multiplier{0.0, 0.0};
  CycleKind kind = CycleKind::repelling;
  bool containsInfinity() const {
    for (const auto& p : points)
      if (p.isInf()) return true;
    return false;
  }
};

CycleKind classifyMultiplier(const Scalar& lambda);

// Multiplier of one orbit step in the charts of the two endpoints (w = 1/z at
// infinity); the cycle multiplier is the product of these factors.
Scalar chartDerivative(const ComplexRatMap& f, const ExtComplex& here, const ExtComplex& next,
                       const ToleranceConfig& tol);

// All cycles of f whose period divides n, found as roots of the fixed-point
// divisor of f^n (infinity included), grouped into orbits with exact periods
// and chain-rule multipliers. Root multiplicities sum to d^n + 1.
std::vector<ComplexCycle> cyclesOfComplexMap(const ComplexRatMap& f, int n,
                                             const ToleranceConfig& tol, int degreeCap = 4096);

struct FsiReport {
  std::vector<ComplexCycle> cycles;
  int nonrepellingCount = 0;  // nonrepelling cycles contained in the plane
  int bound = 0;              // 2d - 2
  int gammaLower = 0;         // attracting + irrationally indifferent cycles
  int deltaUpper = 0;         // critical orbits not seen to be preperiodic
  bool flagged = false;       // bound violated: numerical failure, not a theorem
};

// Census of nonrepelling cycles up to maxPeriod (<= 6), with the conservative
// refined-inequality data: gammaLower counts only weight-1 classes (parabolic
// degeneracies are not computed), deltaUpper counts critical orbits that were
// not detected as preperiodic within 200 iterations at tolerance 1e-8.
// Cycles through infinity are reported but excluded from nonrepellingCount
// (the bound applies a fortiori).
FsiReport nonrepellingCensus(const ComplexRatMap& f, int maxPeriod, const ToleranceConfig& tol);

struct MultiplierPair {
  Scalar lambda;  // multiplier of the cycle attracting the orbit of 0
  Scalar mu;      // multiplier of the cycle attracting the orbit of infinity
  int periodLambda = 0;
  int periodMu = 0;
};

// Iterates both critical points 0 and infinity for up to 10^4 steps, detecting
// convergence to attracting cycles of period <= maxPeriod by tail stability
// (500 steps within 1e-10, chordal metric). Returns the multiplier pair when
// two distinct attracting cycles of period >= minPeriod are found; nullopt
// otherwise (a numerical report, not a proof of absence).
std::optional<MultiplierPair> multiplierPair(const ComplexRatMap& f, int maxPeriod,
                                             const ToleranceConfig& tol, int minPeriod = 1);

// Elementary symmetric functions (e_1, e_d) of the d+1 fixed-point
// multipliers (infinity included, multiplicity-aware); invariant under
// Moebius conjugation.
std::pair<Scalar, Scalar> moduliCoordinates(const ComplexRatMap& f, const ToleranceConfig& tol);

// The moving frame M_t(z) = a(t) + t^r z used to rescale a degenerating
// family.
struct ConjugacyCurve {
  CSeries a;
  ExpQ r{0};
};

struct RescaleRow {
  double t = 0.0;
  double supError = 0.0;
};

struct RescaleTable {
  std::vector<RescaleRow> rows;
  bool decreasing = false;  // sup errors strictly decrease as |t| shrinks
};

// Pointwise convergence check of M_t^{-1} f_t^q M_t toward the limit g: for
// each t, instantiate the family numerically, iterate q times through the
// frame, and record the sup deviation from g over zList. The sample points
// must avoid the holes of the limit by distance >= 0.1 (HoleProximity).
RescaleTable crossValidateRescaling(const RationalMapL& family, const ConjugacyCurve& curve, int q,
                                    const ComplexRatMap& g, const std::vector<double>& tList,
                                    const std::vector<Scalar>& zList, const ToleranceConfig& tol,
                                    int degreeCap = 81);

}  // namespace berkline
