#include "berkline/berkovich.hpp"

#include <algorithm>
#include <cmath>

namespace berkline {

// --------------------------------------------------------------------------
// TypeIIPoint
// --------------------------------------------------------------------------

TypeIIPoint TypeIIPoint::make(const CSeries& center, ExpQ rexp, const ToleranceConfig& tol) {
  // The canonical representative keeps only the center terms below the radius
  // exponent; those terms are exact data (they define the residue coordinate
  // system at the point).
  std::vector<CSeries::Term> t;
  for (const auto& term : center.terms())
    if (term.exp < rexp) t.push_back(term);
  if (center.prec() < rexp) {
    // Terms between prec and rexp are unknown: the ball is not determined.
    fail(Errc::InsufficientPrecision,
         "center known to O(t^" + center.prec().str() + ") cannot define a ball of radius t^" +
             rexp.str());
  }
  TypeIIPoint xi;
  xi.center_ = CSeries::make(std::move(t), exactPrec(), tol);
  xi.rexp_ = rexp;
  return xi;
}

TypeIIPoint TypeIIPoint::gauss() {
  ToleranceConfig tol;
  return make(CSeries::zeroTo(exactPrec()), ExpQ(0), tol);
}

bool TypeIIPoint::eq(const TypeIIPoint& o, const ToleranceConfig& tol) const {
  if (rexp_ != o.rexp_) return false;
  double scale = 0.0;
  for (const auto& t : center_.terms()) scale = std::max(scale, std::abs(t.coef));
  for (const auto& t : o.center_.terms()) scale = std::max(scale, std::abs(t.coef));
  CSeries d = sub(center_, o.center_, tol);
  for (const auto& t : d.terms())
    if (std::abs(t.coef) > tol.zeroAt(scale)) return false;
  return true;
}

bool TypeIIPoint::containsBall(const TypeIIPoint& o, const ToleranceConfig& tol) const {
  if (!(rexp_ <= o.rexp_)) return false;
  CSeries d = sub(center_, o.center_, tol);
  for (const auto& t : d.terms())
    if (t.exp < rexp_) return false;
  return true;
}

bool TypeIIPoint::containsPoint(const ProjPointL& z, const ToleranceConfig& tol) const {
  if (z.isInf()) return false;
  CSeries d = sub(z.affineValue(tol), center_, tol);
  for (const auto& t : d.terms())
    if (t.exp < rexp_) return false;
  // All visible terms sit at exponent >= rexp; a series that is zero to a
  // precision short of rexp leaves the membership open.
  if (d.isZero() && d.prec() < rexp_)
    fail(Errc::InsufficientPrecision, "membership undetermined at this precision");
  return true;
}

std::string TypeIIPoint::str(int digits) const {
  std::string c;
  if (center_.isZero()) {
    c = "0";
  } else {
    CSeries shown = center_.withPrec(rexp_, ToleranceConfig{});
    c = printSeries(shown, digits);
    // strip the "+ O(t^...)" tail: the canonical center is exact below rexp
    size_t pos = c.rfind(" + O(");
    if (pos != std::string::npos) c = c.substr(0, pos);
  }
  return "xi(\"" + c + "\"; " + rexp_.str() + ")";
}

// --------------------------------------------------------------------------
// imageTypeII: generic-point substitution
// --------------------------------------------------------------------------

TangentData imageTypeII(const RationalMapL& phi, const TypeIIPoint& xi,
                        const ToleranceConfig& tol) {
  if (phi.degree() < 1) fail(Errc::InvalidArgument, "imageTypeII needs a dynamical map");
  if (!(phi.minCoeffPrec() >= xi.rexp() + ExpQ(2)))
    fail(Errc::InsufficientPrecision,
         "coefficient precision " + phi.minCoeffPrec().str() + " must exceed rexp " +
             xi.rexp().str() + " by 2");

  // z = a + t^r u with u transcendental over the residue field.
  std::vector<RSeries::Term> at;
  for (const auto& term : xi.center().terms()) at.push_back({term.exp, RatFunc::constant(term.coef)});
  at.push_back({xi.rexp(), RatFunc::identity()});
  RSeries A = RSeries::make(std::move(at), exactPrec(), tol);

  auto horner = [&](const LPoly& side) {
    RSeries acc = RSeries::zeroTo(exactPrec());
    for (int k = phi.degree(); k >= 0; --k) {
      acc = mul(acc, A, tol);
      if (!(side[k].isZero() && side[k].prec() == exactPrec()))
        acc = add(acc, embedSeries(side[k]), tol);
    }
    return acc;
  };
  RSeries X = horner(phi.num());
  RSeries Y = horner(phi.den());

  RSeries w;
  try {
    w = div(X, Y, tol);
  } catch (const Error& e) {
    if (e.code() == Errc::DivisionByZeroSeries)
      fail(Errc::PrecisionExhausted, "denominator vanishes to precision under substitution");
    throw;
  }

  // Scan for the smallest exponent whose coefficient genuinely depends on u:
  // that exponent is the image radius, the coefficient is the tangent map,
  // and the u-free prefix is the image center.
  std::vector<CSeries::Term> centerTerms;
  for (const auto& term : w.terms()) {
    auto c = constantValue(term.coef, tol);
    if (!c) {
      RatFunc f = ratCancel(term.coef, tol);
      if (f.degree() >= 1) {
        TangentData td;
        td.source = xi;
        td.map = f;
        td.localDegree = f.degree();
        CSeries center = CSeries::make(std::move(centerTerms), exactPrec(), tol);
        td.image = TypeIIPoint::make(center, term.exp, tol);
        return td;
      }
      c = f.num().isZero() ? Scalar(0.0) : f.num().leading() / f.den().leading();
    }
    centerTerms.push_back({term.exp, *c});
  }
  fail(Errc::InsufficientPrecision,
       "no u-dependent coefficient below O(t^" + w.prec().str() + "); raise the working precision");
}

// --------------------------------------------------------------------------
// Directions
// --------------------------------------------------------------------------

Direction directionOf(const TypeIIPoint& xi, const BerkTarget& target,
                      const ToleranceConfig& tol) {
  const ExpQ& r = xi.rexp();
  Direction dir{xi, ExtComplex::infinity()};

  if (std::holds_alternative<ProjPointL>(target)) {
    const ProjPointL& z = std::get<ProjPointL>(target);
    if (z.isInf()) return dir;  // infinity lies outward of every finite ball
    CSeries d = sub(z.affineValue(tol), xi.center(), tol);
    Valuation v = d.val();
    if (v.finite && v.v < r) return dir;
    if (!(r < d.prec()))
      fail(Errc::InsufficientPrecision, "direction residue needs the coefficient at t^" + r.str());
    dir.residue = ExtComplex(d.coefAt(r));
    return dir;
  }

  const TypeIIPoint& eta = std::get<TypeIIPoint>(target);
  if (xi.eq(eta, tol)) fail(Errc::SamePoint, "direction from a point to itself");
  if (eta.containsBall(xi, tol)) return dir;  // target contains us: outward
  CSeries d = sub(eta.center(), xi.center(), tol);
  Valuation v = d.val();
  if (v.finite && v.v < r) return dir;  // disjoint balls: the path exits upward
  dir.residue = ExtComplex(d.coefAt(r));
  return dir;
}

// --------------------------------------------------------------------------
// Joins, metric, segments
// --------------------------------------------------------------------------

TypeIIPoint joinOf(const ProjPointL& x, const ProjPointL& y, const ToleranceConfig& tol) {
  if (x.isInf() || y.isInf()) {
    if (x.isInf() && y.isInf()) fail(Errc::SamePoint, "join of infinity with itself");
    fail(Errc::InvalidArgument, "join with infinity is not a finite ball");
  }
  CSeries xa = x.affineValue(tol), ya = y.affineValue(tol);
  CSeries d = sub(xa, ya, tol);
  if (d.isZero()) {
    if (d.prec() >= exactPrec()) fail(Errc::SamePoint, "join of equal points");
    fail(Errc::PrecisionExhausted,
         "points agree to O(t^" + d.prec().str() + "); join is below the precision");
  }
  return TypeIIPoint::make(xa, d.val().v, tol);
}

TypeIIPoint joinOf(const TypeIIPoint& x, const TypeIIPoint& y, const ToleranceConfig& tol) {
  CSeries d = sub(x.center(), y.center(), tol);
  ExpQ m = ExpQ::min(x.rexp(), y.rexp());
  if (!d.isZero()) m = ExpQ::min(m, d.val().v);
  return TypeIIPoint::make(x.center(), m, tol);
}

ExpQ hypDistance(const TypeIIPoint& xi, const TypeIIPoint& eta, const ToleranceConfig& tol) {
  CSeries d = sub(xi.center(), eta.center(), tol);
  ExpQ m = ExpQ::min(xi.rexp(), eta.rexp());
  if (!d.isZero()) m = ExpQ::min(m, d.val().v);
  return (xi.rexp() - m) + (eta.rexp() - m);
}

bool onSegment(const TypeIIPoint& xi, const ProjPointL& x, const ProjPointL& y,
               const ToleranceConfig& tol) {
  if (x.isInf() && y.isInf()) fail(Errc::SamePoint, "degenerate segment");
  if (x.isInf()) return onSegment(xi, y, x, tol);
  if (y.isInf()) {
    // [x, infinity] consists of all balls containing x.
    return xi.containsPoint(x, tol);
  }
  TypeIIPoint j = joinOf(x, y, tol);
  if (!(xi.rexp() >= j.rexp())) return false;
  return xi.containsPoint(x, tol) || xi.containsPoint(y, tol);
}

bool onSegment(const TypeIIPoint& xi, const TypeIIPoint& x, const TypeIIPoint& y,
               const ToleranceConfig& tol) {
  return hypDistance(x, xi, tol) + hypDistance(xi, y, tol) == hypDistance(x, y, tol);
}

TypeIIPoint pointOnSegment(const TypeIIPoint& x, const TypeIIPoint& y, const ExpQ& delta,
                           const ToleranceConfig& tol) {
  CSeries d = sub(x.center(), y.center(), tol);
  ExpQ m = ExpQ::min(x.rexp(), y.rexp());
  if (!d.isZero()) m = ExpQ::min(m, d.val().v);
  ExpQ up = x.rexp() - m;  // length of the ascent from x to the join
  if (delta <= up) return TypeIIPoint::make(x.center(), x.rexp() - delta, tol);
  ExpQ rest = delta - up;
  if (rest > y.rexp() - m) fail(Errc::InvalidArgument, "segment parameter exceeds its length");
  return TypeIIPoint::make(y.center(), m + rest, tol);
}

TypeIIPoint medianPoint(const TypeIIPoint& a, const TypeIIPoint& b, const TypeIIPoint& c,
                        const ToleranceConfig& tol) {
  TypeIIPoint jab = joinOf(a, b, tol), jac = joinOf(a, c, tol), jbc = joinOf(b, c, tol);
  TypeIIPoint best = jab;
  if (jac.rexp() > best.rexp()) best = jac;
  if (jbc.rexp() > best.rexp()) best = jbc;
  return best;
}

// --------------------------------------------------------------------------
// Ramification of bicritical maps
// --------------------------------------------------------------------------

bool onRamification(const RationalMapL& phi, const TypeIIPoint& xi, const ToleranceConfig& tol) {
  auto [c1, c2] = criticalPointsBicritical(phi, tol);
  return onSegment(xi, c1, c2, tol);
}

bool isBadDirection(const RationalMapL& phi, const Direction& dir, const ToleranceConfig& tol) {
  auto [c1, c2] = criticalPointsBicritical(phi, tol);
  if (onSegment(dir.at, c1, c2, tol)) return false;
  // Off the ramification segment both critical points sit in one direction:
  // the unique bad one.
  Direction toward = directionOf(dir.at, BerkTarget(c1), tol);
  return dir.residue.eq(toward.residue, tol.rootMatch);
}

// --------------------------------------------------------------------------
// Literals
// --------------------------------------------------------------------------

TypeIIPoint parseTypeII(const std::string& text, const ToleranceConfig& tol, ExpQ defaultPrec,
                        std::int64_t ramificationBound) {
  (void)defaultPrec;
  auto err = [&](const std::string& what) { fail(Errc::SyntaxError, what + " in \"" + text + "\""); };
  size_t pos = 0;
  auto skipWs = [&] {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  };
  skipWs();
  if (text.compare(pos, 5, "gauss") == 0) return TypeIIPoint::gauss();
  if (text.compare(pos, 2, "xi") != 0) err("expected xi(...) or gauss");
  pos += 2;
  skipWs();
  if (pos >= text.size() || text[pos] != '(') err("expected '('");
  ++pos;
  skipWs();
  if (pos >= text.size() || text[pos] != '"') err("expected quoted center series");
  size_t end = text.find('"', pos + 1);
  if (end == std::string::npos) err("unterminated center string");
  // Centers are exact data: parse with unbounded default precision.
  CSeries center = parseSeries(text.substr(pos + 1, end - pos - 1), tol, exactPrec(),
                               ramificationBound);
  pos = end + 1;
  skipWs();
  if (pos >= text.size() || text[pos] != ';') err("expected ';'");
  ++pos;
  skipWs();
  size_t close = text.find(')', pos);
  if (close == std::string::npos) err("expected ')'");
  std::string rpart = text.substr(pos, close - pos);
  std::int64_t rn = 0, rd = 1;
  size_t slash = rpart.find('/');
  try {
    if (slash == std::string::npos) {
      rn = std::stoll(rpart);
    } else {
      rn = std::stoll(rpart.substr(0, slash));
      rd = std::stoll(rpart.substr(slash + 1));
    }
  } catch (...) {
    err("bad radius exponent");
  }
  if (rd <= 0) err("radius denominator must be positive");
  if (rd > ramificationBound)
    fail(Errc::RamificationBound, "radius denominator exceeds the ramification bound");
  return TypeIIPoint::make(center, ExpQ(rn, rd), tol);
}

}  // namespace berkline
