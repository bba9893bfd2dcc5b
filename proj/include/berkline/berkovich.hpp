#pragma once

#include <variant>

#include "berkline/ratmap.hpp"

namespace berkline {

// A type II point xi(a; r): the closed ball {|z - a| <= |t|^r} with center a
// in the Puiseux field and radius exponent r in Q. Canonical form keeps only
// the center terms with exponent < r; two points are equal iff the radius
// exponents agree and the centers agree below that radius.
class TypeIIPoint {
 public:
  TypeIIPoint() : center_(CSeries::zeroTo(exactPrec())), rexp_(0) {}  // the Gauss point

  static TypeIIPoint make(const CSeries& center, ExpQ rexp, const ToleranceConfig& tol);
  static TypeIIPoint gauss();

  const CSeries& center() const { return center_; }
  const ExpQ& rexp() const { return rexp_; }

  bool eq(const TypeIIPoint& o, const ToleranceConfig& tol) const;
  // True when the closed ball of this point contains the other's (rexp <=
  // other's and centers agree below this radius).
  bool containsBall(const TypeIIPoint& o, const ToleranceConfig& tol) const;
  bool containsPoint(const ProjPointL& z, const ToleranceConfig& tol) const;

  std::string str(int digits = 17) const;  // xi("<center>"; n/d)

 private:
  CSeries center_;
  ExpQ rexp_;
};

// A direction (tangent vector) at a type II point: the connected component of
// the complement containing some target. Directions at xi(a; r) are labelled
// by the residue line: residue c means the component of a + c t^r + higher,
// residue infinity the outward component (larger balls and infinity).
struct Direction {
  TypeIIPoint at;
  ExtComplex residue;
};

// Image data of a type II point: the image point, the induced map between
// residue lines in the canonical coordinates of source and image, and its
// degree (the local degree of phi at the point).
struct TangentData {
  TypeIIPoint source;
  TypeIIPoint image;
  RatFunc map;  // in the direction variable u
  int localDegree = 1;
};

// Computes phi(xi) together with the tangent map by generic-point
// substitution: z = a + t^r u with u transcendental over the residue field,
// projective evaluation in series with rational-function coefficients, and a
// scan for the smallest exponent whose coefficient depends on u. Requires the
// coefficient precision of phi to exceed rexp by at least 2.
TangentData imageTypeII(const RationalMapL& phi, const TypeIIPoint& xi,
                        const ToleranceConfig& tol);

using BerkTarget = std::variant<ProjPointL, TypeIIPoint>;

// The direction at xi containing the target (type I or type II) point.
Direction directionOf(const TypeIIPoint& xi, const BerkTarget& target, const ToleranceConfig& tol);

// The smallest closed ball containing both type I points (their join in the
// tree). Throws SamePoint for equal inputs, PrecisionExhausted when the
// separating valuation exceeds the available precision.
TypeIIPoint joinOf(const ProjPointL& x, const ProjPointL& y, const ToleranceConfig& tol);
TypeIIPoint joinOf(const TypeIIPoint& x, const TypeIIPoint& y, const ToleranceConfig& tol);

// Hyperbolic distance between type II points: with m = min(r, s, val(a-b)),
// rho = (r - m) + (s - m).
ExpQ hypDistance(const TypeIIPoint& xi, const TypeIIPoint& eta, const ToleranceConfig& tol);

// Whether xi lies on the closed segment between two type I points.
bool onSegment(const TypeIIPoint& xi, const ProjPointL& x, const ProjPointL& y,
               const ToleranceConfig& tol);
// Whether a type II point lies on the closed segment between two type II points.
bool onSegment(const TypeIIPoint& xi, const TypeIIPoint& x, const TypeIIPoint& y,
               const ToleranceConfig& tol);
// The point of [x, y] at distance delta from x (0 <= delta <= rho(x, y)).
TypeIIPoint pointOnSegment(const TypeIIPoint& x, const TypeIIPoint& y, const ExpQ& delta,
                           const ToleranceConfig& tol);
// The median (meeting point) of the three pairwise segments.
TypeIIPoint medianPoint(const TypeIIPoint& a, const TypeIIPoint& b, const TypeIIPoint& c,
                        const ToleranceConfig& tol);

// The ramification locus of a bicritical map is the segment joining its two
// critical points; local degree is d exactly on it and 1 off it.
bool onRamification(const RationalMapL& phi, const TypeIIPoint& xi, const ToleranceConfig& tol);

// A direction at a point off the ramification segment is bad iff it is the
// (unique) direction meeting that segment; every direction at a point on the
// segment is good.
bool isBadDirection(const RationalMapL& phi, const Direction& dir, const ToleranceConfig& tol);

// Parses `xi("<center series>"; <num>/<den>)` or the alias `gauss`.
TypeIIPoint parseTypeII(const std::string& text, const ToleranceConfig& tol,
                        ExpQ defaultPrec = ExpQ(6), std::int64_t ramificationBound = 64);

}  // namespace berkline
