#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "berkline/algebra.hpp"
#include "berkline/expq.hpp"
#include "berkline/errors.hpp"

namespace berkline {

// Valuation of a truncated series: the leading exponent, or "zero as far as
// the precision can see". ZeroToPrecision is an ordinary outcome, not an
// error; callers decide whether it is fatal.
struct Valuation {
  bool finite = false;
  ExpQ v{0};

  static Valuation of(ExpQ e) { return {true, e}; }
  static Valuation zeroTo(ExpQ prec) { return {false, prec}; }
  // exponent if finite, else the precision bound: the correct lower bound for
  // the valuation in either case (used by precision propagation).
  ExpQ bound() const { return v; }
};

// Precision marker for values that are exact by construction (ball centers,
// conjugating frames). Large enough that the other operand's precision always
// binds first.
inline ExpQ exactPrec() { return ExpQ(1000000000); }

// --- coefficient field plug-ins -------------------------------------------

struct ComplexField {
  using Elem = Scalar;
  static Elem zero() { return Scalar(0.0); }
  static Elem one() { return Scalar(1.0); }
  static Elem add(const Elem& a, const Elem& b, const ToleranceConfig&) { return a + b; }
  static Elem sub(const Elem& a, const Elem& b, const ToleranceConfig&) { return a - b; }
  static Elem mul(const Elem& a, const Elem& b, const ToleranceConfig&) { return a * b; }
  static Elem div(const Elem& a, const Elem& b, const ToleranceConfig&) { return a / b; }
  static Elem neg(const Elem& a) { return -a; }
  static double magnitude(const Elem& a) { return std::abs(a); }
  static bool isZero(const Elem& a, const ToleranceConfig& tol, double scale) {
    return std::abs(a) <= tol.zeroAt(scale);
  }
};

// Rational functions in a direction variable u. Operations stay gcd-free
// (raw numerator/denominator products) until degrees pass a threshold, at
// which point root-matching cancellation trims them back; final consumers
// canonicalize explicitly.
struct RatFuncField {
  using Elem = RatFunc;
  static constexpr int kCancelThreshold = 48;

  static Elem zero() { return RatFunc(); }
  static Elem one() { return RatFunc::constant(Scalar(1.0)); }
  static Elem trimIfLarge(Elem f, const ToleranceConfig& tol) {
    if (f.num().degree() + f.den().degree() > kCancelThreshold) return ratCancel(f, tol);
    return f;
  }
  static Elem add(const Elem& a, const Elem& b, const ToleranceConfig& tol) {
    if (a.den().coeffs() == b.den().coeffs())
      return trimIfLarge(RatFunc::raw(berkline::add(a.num(), b.num(), tol), a.den()), tol);
    Poly n = berkline::add(berkline::mul(a.num(), b.den(), tol),
                           berkline::mul(b.num(), a.den(), tol), tol);
    return trimIfLarge(RatFunc::raw(std::move(n), berkline::mul(a.den(), b.den(), tol)), tol);
  }
  static Elem sub(const Elem& a, const Elem& b, const ToleranceConfig& tol) {
    return add(a, neg(b), tol);
  }
  static Elem mul(const Elem& a, const Elem& b, const ToleranceConfig& tol) {
    return trimIfLarge(RatFunc::raw(berkline::mul(a.num(), b.num(), tol),
                                    berkline::mul(a.den(), b.den(), tol)),
                       tol);
  }
  static Elem div(const Elem& a, const Elem& b, const ToleranceConfig& tol) {
    if (b.num().isZero()) fail(Errc::ZeroDenominator, "division by zero rational function");
    return trimIfLarge(RatFunc::raw(berkline::mul(a.num(), b.den(), tol),
                                    berkline::mul(a.den(), b.num(), tol)),
                       tol);
  }
  static Elem neg(const Elem& a) { return ratNeg(a); }
  static double magnitude(const Elem& a) {
    if (a.num().isZero()) return 0.0;
    return a.num().maxMag() / std::max(a.den().maxMag(), 1e-300);
  }
  static bool isZero(const Elem& a, const ToleranceConfig& tol, double scale) {
    if (a.num().isZero()) return true;
    return magnitude(a) <= tol.zeroAt(scale);
  }
};

// --- the series type --------------------------------------------------------

// Truncated Puiseux series: finitely many terms with strictly increasing
// exact rational exponents, known modulo O(t^prec).
template <class F>
class Series {
 public:
  using K = typename F::Elem;
  struct Term {
    ExpQ exp;
    K coef;
  };

  Series() : prec_(0) {}

  static Series zeroTo(ExpQ prec) {
    Series s;
    s.prec_ = prec;
    return s;
  }

  static Series make(std::vector<Term> terms, ExpQ prec, const ToleranceConfig& tol) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) { return a.exp < b.exp; });
    std::vector<Term> merged;
    for (auto& t : terms) {
      if (!(t.exp < prec)) continue;  // beyond precision: not data
      if (!merged.empty() && merged.back().exp == t.exp)
        merged.back().coef = F::add(merged.back().coef, t.coef, tol);
      else
        merged.push_back(std::move(t));
    }
    double scale = 0.0;
    for (const auto& t : merged) scale = std::max(scale, F::magnitude(t.coef));
    Series s;
    s.prec_ = prec;
    for (auto& t : merged)
      if (!F::isZero(t.coef, tol, scale)) s.t_.push_back(std::move(t));
    return s;
  }

  static Series constant(const K& c, ExpQ prec, const ToleranceConfig& tol) {
    return make({{ExpQ(0), c}}, prec, tol);
  }
  static Series monomial(const K& c, ExpQ e, ExpQ prec, const ToleranceConfig& tol) {
    return make({{e, c}}, prec, tol);
  }

  bool isZero() const { return t_.empty(); }
  const std::vector<Term>& terms() const { return t_; }
  const ExpQ& prec() const { return prec_; }

  Valuation val() const {
    if (t_.empty()) return Valuation::zeroTo(prec_);
    return Valuation::of(t_.front().exp);
  }

  K coefAt(const ExpQ& e) const {
    for (const auto& t : t_)
      if (t.exp == e) return t.coef;
    return F::zero();
  }

  // Re-marks the series as exact (all omitted terms genuinely zero). Only for
  // values that are exact by construction.
  Series asExact() const {
    Series s = *this;
    s.prec_ = exactPrec();
    return s;
  }
  Series withPrec(ExpQ p, const ToleranceConfig& tol) const {
    return make(t_, p, tol);
  }

 private:
  std::vector<Term> t_;
  ExpQ prec_;
};

using CSeries = Series<ComplexField>;
using RSeries = Series<RatFuncField>;

template <class F>
Series<F> add(const Series<F>& a, const Series<F>& b, const ToleranceConfig& tol) {
  ExpQ prec = ExpQ::min(a.prec(), b.prec());
  std::vector<typename Series<F>::Term> t(a.terms());
  t.insert(t.end(), b.terms().begin(), b.terms().end());
  return Series<F>::make(std::move(t), prec, tol);
}

template <class F>
Series<F> neg(const Series<F>& a) {
  std::vector<typename Series<F>::Term> t(a.terms());
  for (auto& x : t) x.coef = F::neg(x.coef);
  ToleranceConfig tol;
  return Series<F>::make(std::move(t), a.prec(), tol);
}

template <class F>
Series<F> sub(const Series<F>& a, const Series<F>& b, const ToleranceConfig& tol) {
  return add(a, neg(b), tol);
}

template <class F>
Series<F> mul(const Series<F>& a, const Series<F>& b, const ToleranceConfig& tol) {
  ExpQ va = a.val().bound(), vb = b.val().bound();
  ExpQ prec = ExpQ::min(a.prec() + vb, b.prec() + va);
  std::vector<typename Series<F>::Term> t;
  for (const auto& x : a.terms())
    for (const auto& y : b.terms()) {
      ExpQ e = x.exp + y.exp;
      if (e < prec) t.push_back({e, F::mul(x.coef, y.coef, tol)});
    }
  return Series<F>::make(std::move(t), prec, tol);
}

template <class F>
Series<F> scaleSeries(const Series<F>& a, const typename F::Elem& c, const ToleranceConfig& tol) {
  std::vector<typename Series<F>::Term> t(a.terms());
  for (auto& x : t) x.coef = F::mul(x.coef, c, tol);
  return Series<F>::make(std::move(t), a.prec(), tol);
}

// a * t^e (exact monomial shift).
template <class F>
Series<F> shiftSeries(const Series<F>& a, const ExpQ& e) {
  std::vector<typename Series<F>::Term> t(a.terms());
  for (auto& x : t) x.exp = x.exp + e;
  ToleranceConfig tol;
  return Series<F>::make(std::move(t), a.prec() + e, tol);
}

// 1/b via the geometric expansion around the leading term.
template <class F>
Series<F> inverse(const Series<F>& b, const ToleranceConfig& tol) {
  if (b.isZero()) fail(Errc::DivisionByZeroSeries, "inverse of a series that is zero to precision");
  ExpQ v = b.terms().front().exp;
  const auto& c0 = b.terms().front().coef;
  ExpQ relPrec = b.prec() - v;  // relative precision of b (and of the inverse)

  std::vector<typename Series<F>::Term> ht;
  for (size_t i = 1; i < b.terms().size(); ++i)
    ht.push_back({b.terms()[i].exp - v, F::div(b.terms()[i].coef, c0, tol)});
  Series<F> h = Series<F>::make(std::move(ht), relPrec, tol);

  Series<F> acc = Series<F>::constant(F::one(), relPrec, tol);
  if (!h.isZero()) {
    Series<F> negh = neg(h);
    Series<F> pw = Series<F>::constant(F::one(), relPrec, tol);
    for (int guard = 0; guard < 4096; ++guard) {
      pw = mul(pw, negh, tol);
      if (pw.isZero() || !(pw.val().bound() < relPrec)) break;
      acc = add(acc, pw, tol);
    }
  }
  Series<F> shifted = shiftSeries(acc, -v);  // prec becomes relPrec - v = pb - 2v
  return scaleSeries(shifted, F::div(F::one(), c0, tol), tol);
}

template <class F>
Series<F> div(const Series<F>& a, const Series<F>& b, const ToleranceConfig& tol) {
  Series<F> r = mul(a, inverse(b, tol), tol);
  if (r.isZero() && !a.isZero())
    fail(Errc::PrecisionExhausted, "division result has no representable terms");
  return r;
}

// Rational-function coefficients get a dedicated inverse: when the divisor's
// coefficients reduce to polynomials, the geometric expansion is carried out
// with an explicit power-of-the-leading-polynomial denominator, and every
// output coefficient is lifted to one shared denominator. This keeps the
// gcd-free arithmetic from piling up equivalent-but-differently-rounded
// denominator products (which defeat the equal-denominator fast path and
// explode degrees).
RSeries inverse(const RSeries& b, const ToleranceConfig& tol);

template <class F>
Series<F> truncate(const Series<F>& s, const ExpQ& newPrec) {
  if (newPrec > s.prec())
    fail(Errc::PrecisionIncrease, "truncate to " + newPrec.str() + " from " + s.prec().str());
  ToleranceConfig tol;
  return Series<F>::make(s.terms(), newPrec, tol);
}

template <class F>
Valuation valuation(const Series<F>& s) {
  return s.val();
}

enum class SeriesOp { Add, Sub, Mul, Div };

template <class F>
Series<F> seriesArith(const Series<F>& a, const Series<F>& b, SeriesOp op,
                      const ToleranceConfig& tol) {
  switch (op) {
    case SeriesOp::Add: return add(a, b, tol);
    case SeriesOp::Sub: return sub(a, b, tol);
    case SeriesOp::Mul: return mul(a, b, tol);
    case SeriesOp::Div: return div(a, b, tol);
  }
  fail(Errc::InvalidArgument, "unknown series op");
}

// Termwise comparison (exponent lists equal, coefficients within eps scaled by
// the larger coefficient magnitude). Precision is not compared.
bool approxEqual(const CSeries& a, const CSeries& b, double eps);

// Embed complex-coefficient series into the rational-function field.
RSeries embedSeries(const CSeries& s);

// Numeric specialization at a concrete parameter value: sum coef * t^exp with
// the principal branch for fractional exponents.
Scalar evalSeriesNumeric(const CSeries& s, const Scalar& t);

// Parses the series grammar:
//   series := term (('+'|'-') term)* ('+' 'O(t^' exp ')')?
//   term   := coef ('*'? 't' ('^' exp)?)? | 't' ('^' exp)?
//   exp    := integer | '(' integer '/' integer ')'
// Default precision is O(t^6) when no tail is given. Exponent denominators
// above ramificationBound raise RamificationBound.
CSeries parseSeries(const std::string& text, const ToleranceConfig& tol,
                    ExpQ defaultPrec = ExpQ(6), std::int64_t ramificationBound = 64);

std::string printSeries(const CSeries& s, int digits = 17);

}  // namespace berkline
