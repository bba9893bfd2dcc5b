#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "berkline/errors.hpp"

namespace berkline {

using Scalar = std::complex<double>;

// Tolerances used by every approximate-zero decision in the library. Passed
// explicitly; there is no global state.
struct ToleranceConfig {
  double zeroAbs = 1e-12;   // absolute floor for treating a coefficient as zero
  double zeroRel = 1e-9;    // relative part, scaled by the operand's max magnitude
  double rootMatch = 1e-7;  // radius for clustering / matching roots

  double zeroAt(double scale) const { return zeroAbs + zeroRel * scale; }
};

bool isFinite(const Scalar& s);

// A point of the Riemann sphere: a finite complex value or the point at
// infinity. Infinity lives only here and in direction residues, never inside
// polynomial coefficients.
struct ExtComplex {
  Scalar v{0.0, 0.0};
  bool inf = false;

  ExtComplex() = default;
  ExtComplex(const Scalar& s) : v(s) {}
  ExtComplex(double x) : v(x, 0.0) {}
  static ExtComplex infinity() {
    ExtComplex e;
    e.inf = true;
    return e;
  }
  bool isInf() const { return inf; }
  bool eq(const ExtComplex& o, double eps) const {
    if (inf || o.inf) return inf == o.inf;
    return std::abs(v - o.v) <= eps;
  }
};

std::string formatComplex(const Scalar& z, int digits = 17);
std::string formatExtComplex(const ExtComplex& z, int digits = 17);
// Parses the complex literal grammar: `a`, `bi`, `a+bi`, `a-bi`, optionally
// wrapped in parentheses. Throws SyntaxError with the offending position.
Scalar parseComplex(const std::string& text);

// ---------------------------------------------------------------------------
// Polynomials over the complex scalars, coefficients lowest degree first.
// Canonical form: the leading coefficient is nonzero under the tolerance or
// the polynomial is the empty (zero) polynomial.
// ---------------------------------------------------------------------------
class Poly {
 public:
  Poly() = default;
  Poly(std::vector<Scalar> coeffs, const ToleranceConfig& tol) : c_(std::move(coeffs)) {
    trim(tol);
  }

  static Poly zero() { return Poly(); }
  static Poly one();
  static Poly constant(const Scalar& c);
  static Poly linear(const Scalar& c0, const Scalar& c1);  // c0 + c1*z
  // Expands lead * prod (z - r_i)^{m_i}.
  static Poly fromRoots(const std::vector<std::pair<Scalar, int>>& roots, const Scalar& lead);

  bool isZero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar coeff(size_t i) const { return i < c_.size() ? c_[i] : Scalar(0.0); }
  Scalar leading() const { return c_.empty() ? Scalar(0.0) : c_.back(); }
  double maxMag() const;

  Scalar eval(const Scalar& z) const;
  Poly derivative() const;
  // Divides by (z - root), discarding the remainder; the caller asserts that
  // root is (numerically) a root.
  Poly deflate(const Scalar& root) const;
  // Reverses the coefficients relative to the given degree, i.e. z^d * p(1/z).
  Poly reversed(int degreeHint, const ToleranceConfig& tol) const;

  void trim(const ToleranceConfig& tol);

 private:
  std::vector<Scalar> c_;
};

Poly add(const Poly& a, const Poly& b, const ToleranceConfig& tol);
Poly sub(const Poly& a, const Poly& b, const ToleranceConfig& tol);
Poly mul(const Poly& a, const Poly& b, const ToleranceConfig& tol);
Poly scale(const Poly& a, const Scalar& s, const ToleranceConfig& tol);
// a * z^k
Poly shift(const Poly& a, int k);
bool approxEqual(const Poly& a, const Poly& b, double eps);

// All complex roots with multiplicity. Clusters of roots closer than
// tol.rootMatch are merged with summed multiplicity. Throws ZeroPolynomial on
// the canonical zero and NoConvergence if the simultaneous iteration fails
// after restarts.
std::vector<std::pair<Scalar, int>> polyRoots(const Poly& p, const ToleranceConfig& tol);

// ---------------------------------------------------------------------------
// Rational functions in one variable. Canonical invariants: denominator monic
// and nonzero, numerator and denominator sharing no root pair within the
// cancellation tolerance. Raw (uncanceled) values are used internally by the
// series layer; every public result is canonical.
// ---------------------------------------------------------------------------
class RatFunc {
 public:
  RatFunc() : num_(), den_(Poly::one()) {}  // the zero function

  static RatFunc raw(Poly num, Poly den);
  static RatFunc constant(const Scalar& c);
  static RatFunc identity();  // u -> u

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool isZero() const { return num_.isZero(); }
  int degree() const { return std::max(num_.degree(), den_.degree()); }

  // Projective evaluation; a vanishing denominator (with nonvanishing
  // numerator) yields infinity.
  ExtComplex eval(const Scalar& z) const;
  ExtComplex eval(const ExtComplex& z) const;
  ExtComplex evalAtInf() const;

 private:
  Poly num_, den_;
};

// Canonicalizes num/den: matches common roots within tol.rootMatch, removes
// them with multiplicity, and normalizes the denominator to be monic. Throws
// ZeroDenominator if den is canonically zero.
RatFunc ratCancel(const Poly& num, const Poly& den, const ToleranceConfig& tol);
RatFunc ratCancel(const RatFunc& f, const ToleranceConfig& tol);

// outer(inner(z)), canonicalized. Throws ZeroDenominator if the composite is
// identically infinity.
RatFunc ratCompose(const RatFunc& outer, const RatFunc& inner, const ToleranceConfig& tol);

RatFunc ratAdd(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol);
RatFunc ratSub(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol);
RatFunc ratMul(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol);
RatFunc ratDiv(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol);
RatFunc ratNeg(const RatFunc& a);
RatFunc ratDerivative(const RatFunc& a, const ToleranceConfig& tol);

// If f is constant (as a reduced function), returns its value.
std::optional<Scalar> constantValue(const RatFunc& f, const ToleranceConfig& tol);

// 1/f(1/u) — conjugation by the coordinate swap u -> 1/u.
RatFunc swapChart(const RatFunc& f, const ToleranceConfig& tol);

// Order of vanishing of f(u) - u at the point c (0 if c is not fixed).
int fixedPointMultiplicity(const RatFunc& f, const ExtComplex& c, const ToleranceConfig& tol);

// Critical points of a rational map of the sphere, with multiplicity
// (including infinity when critical). Total multiplicity is 2*deg - 2.
std::vector<std::pair<ExtComplex, int>> criticalPointsOf(const RatFunc& f,
                                                         const ToleranceConfig& tol);

std::string formatPoly(const Poly& p, const std::string& var, int digits = 17);
std::string formatRatFunc(const RatFunc& f, const std::string& var, int digits = 17);

}  // namespace berkline
