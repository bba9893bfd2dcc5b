#pragma once

#include <utility>
#include <vector>

#include "berkline/puiseux.hpp"

namespace berkline {

// Reductions and rescaling limits are complex rational maps; they share the
// canonical RatFunc representation.
using ComplexRatMap = RatFunc;

// Polynomials in z with Puiseux-series coefficients (index = power of z).
using LPoly = std::vector<CSeries>;

LPoly lpolyAdd(const LPoly& a, const LPoly& b, const ToleranceConfig& tol);
LPoly lpolyMul(const LPoly& a, const LPoly& b, const ToleranceConfig& tol);
LPoly lpolyScale(const LPoly& a, const CSeries& s, const ToleranceConfig& tol);

// A point of the projective line over the Puiseux field, in homogeneous
// coordinates [X : Y] normalized so that min(val X, val Y) = 0. Infinity is
// [1 : 0].
class ProjPointL {
 public:
  static ProjPointL make(CSeries X, CSeries Y, const ToleranceConfig& tol);
  static ProjPointL affine(const CSeries& z, const ToleranceConfig& tol);
  static ProjPointL infinity();

  const CSeries& X() const { return X_; }
  const CSeries& Y() const { return Y_; }
  // True when the point is infinity as far as the precision can see.
  bool isInf() const { return Y_.isZero(); }
  // The affine value X/Y; throws DivisionByZeroSeries at infinity.
  CSeries affineValue(const ToleranceConfig& tol) const;

  bool eq(const ProjPointL& o, const ToleranceConfig& tol) const;

 private:
  ProjPointL() = default;
  CSeries X_, Y_;
};

// Multiset of points of the Riemann sphere where a degenerating family loses
// degree at t=0; the locally-uniform limit fails exactly there.
struct HoleSet {
  std::vector<std::pair<ExtComplex, int>> entries;
  int totalMultiplicity() const {
    int n = 0;
    for (const auto& e : entries) n += e.second;
    return n;
  }
  int multiplicityAt(const ExtComplex& z, double eps) const {
    for (const auto& e : entries)
      if (e.first.eq(z, eps)) return e.second;
    return 0;
  }
};

// A rational map over the Puiseux field: a pair of z-polynomials with series
// coefficients. Dynamical maps have degree >= 1; reductions of constants are
// permitted only via allowConstant.
class RationalMapL {
 public:
  static RationalMapL make(LPoly num, LPoly den, const ToleranceConfig& tol,
                           bool allowConstant = false);

  int degree() const { return degree_; }
  const LPoly& num() const { return num_; }
  const LPoly& den() const { return den_; }
  // The weakest coefficient precision; reduction and substitution quality is
  // limited by this.
  ExpQ minCoeffPrec() const;

 private:
  RationalMapL() = default;
  LPoly num_, den_;
  int degree_ = 0;
};

// phi(z) evaluated projectively at a type I point. Throws PrecisionExhausted
// when both homogeneous outputs vanish to precision.
ProjPointL evalMap(const RationalMapL& phi, const ProjPointL& z, const ToleranceConfig& tol);

// Affine evaluation N(z)/D(z) as a series; DivisionByZeroSeries if the image
// is infinity at this precision.
CSeries evalAffine(const RationalMapL& phi, const CSeries& z, const ToleranceConfig& tol);

RationalMapL composeMaps(const RationalMapL& phi, const RationalMapL& psi,
                         const ToleranceConfig& tol, int degreeCap = 81);
RationalMapL iterateMap(const RationalMapL& phi, int n, const ToleranceConfig& tol,
                        int degreeCap = 81);

// Quotient-rule derivative (N'D - N D')/D^2, returned unreduced.
RationalMapL derivativeMap(const RationalMapL& phi, const ToleranceConfig& tol);

struct ReduceResult {
  HoleSet holes;
  ComplexRatMap reduced;
  bool reducedIsInfinity = false;  // the degenerate constant-infinity reduction
};

// Divides all homogeneous coefficients by t^(min valuation), sets t = 0, and
// splits the resulting complex pair into its common factor (the holes) and
// the reduced map. deg(reduced) + |holes| = deg(phi).
ReduceResult reduceModT(const RationalMapL& phi, const ToleranceConfig& tol);

// The two totally ramified points of a map in recognizable bicritical shape:
// either supported on {z^0, z^d} (critical points 0 and infinity) or with
// numerator/denominator that are d-th powers of linear factors. Throws
// NotBicritical otherwise.
std::pair<ProjPointL, ProjPointL> criticalPointsBicritical(const RationalMapL& phi,
                                                           const ToleranceConfig& tol);

// Numeric instantiation at a concrete parameter value t (no cancellation: the
// coefficients are evaluated as given).
ComplexRatMap instantiateAt(const RationalMapL& phi, const Scalar& t, const ToleranceConfig& tol);

// Parses `ratmap { num = ["<series>", ...], den = ["<series>", ...] }`.
RationalMapL parseRatMapLiteral(const std::string& text, const ToleranceConfig& tol,
                                ExpQ defaultPrec = ExpQ(6), std::int64_t ramificationBound = 64);

std::string printRatMapLiteral(const RationalMapL& phi, int digits = 17);

}  // namespace berkline
