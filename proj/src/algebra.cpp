#include "berkline/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>

namespace berkline {

const char* errcName(Errc c) {
  switch (c) {
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::RamificationBound: return "RamificationBound";
    case Errc::DivisionByZeroSeries: return "DivisionByZeroSeries";
    case Errc::PrecisionExhausted: return "PrecisionExhausted";
    case Errc::PrecisionIncrease: return "PrecisionIncrease";
    case Errc::DegreeCapExceeded: return "DegreeCapExceeded";
    case Errc::NotBicritical: return "NotBicritical";
    case Errc::SamePoint: return "SamePoint";
    case Errc::InsufficientPrecision: return "InsufficientPrecision";
    case Errc::NewtonDiverged: return "NewtonDiverged";
    case Errc::NotRepelling: return "NotRepelling";
    case Errc::MembershipUndecidable: return "MembershipUndecidable";
    case Errc::HoleProximity: return "HoleProximity";
    case Errc::NoSolution: return "NoSolution";
    case Errc::Degenerate: return "Degenerate";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Overflow: return "Overflow";
  }
  return "UnknownError";
}

bool isFinite(const Scalar& s) { return std::isfinite(s.real()) && std::isfinite(s.imag()); }

// --------------------------------------------------------------------------
// Complex literal formatting and parsing.
// --------------------------------------------------------------------------

static std::string formatReal(double x, int digits) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

std::string formatComplex(const Scalar& z, int digits) {
  double re = z.real() == 0.0 ? 0.0 : z.real();
  double im = z.imag() == 0.0 ? 0.0 : z.imag();
  if (im == 0.0) return formatReal(re, digits);
  if (re == 0.0) return formatReal(im, digits) + "i";
  std::string s = formatReal(re, digits);
  s += (im < 0.0 || (im == 0.0 && std::signbit(im))) ? "-" : "+";
  s += formatReal(std::abs(im), digits) + "i";
  return s;
}

std::string formatExtComplex(const ExtComplex& z, int digits) {
  return z.inf ? "inf" : formatComplex(z.v, digits);
}

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  bool done() const { return pos >= s.size(); }
  char peek() const { return done() ? '\0' : s[pos]; }
  void skipWs() {
    while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  [[noreturn]] void err(const std::string& what) const {
    fail(Errc::SyntaxError, what + " at position " + std::to_string(pos) + " in \"" + s + "\"");
  }
};

double parseRealAt(Cursor& c) {
  size_t start = c.pos;
  if (c.peek() == '+' || c.peek() == '-') ++c.pos;
  bool digits = false;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
    ++c.pos;
    digits = true;
  }
  if (c.peek() == '.') {
    ++c.pos;
    while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
      ++c.pos;
      digits = true;
    }
  }
  if (!digits) c.err("expected number");
  if (c.peek() == 'e' || c.peek() == 'E') {
    size_t save = c.pos;
    ++c.pos;
    if (c.peek() == '+' || c.peek() == '-') ++c.pos;
    if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
      while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.pos;
    } else {
      c.pos = save;  // not an exponent
    }
  }
  return std::stod(c.s.substr(start, c.pos - start));
}

// complex := real | real 'i' | real (+|-) real 'i' | 'i'-forms with implicit 1
Scalar parseComplexAt(Cursor& c) {
  c.skipWs();
  double first;
  if (c.peek() == 'i') {
    ++c.pos;
    return Scalar(0.0, 1.0);
  }
  if ((c.peek() == '+' || c.peek() == '-') && c.pos + 1 < c.s.size() && c.s[c.pos + 1] == 'i') {
    double sign = c.peek() == '-' ? -1.0 : 1.0;
    c.pos += 2;
    return Scalar(0.0, sign);
  }
  first = parseRealAt(c);
  if (c.peek() == 'i') {
    ++c.pos;
    return Scalar(0.0, first);
  }
  c.skipWs();
  if (c.peek() == '+' || c.peek() == '-') {
    size_t save = c.pos;
    double sign = c.peek() == '-' ? -1.0 : 1.0;
    ++c.pos;
    c.skipWs();
    if (c.peek() == 'i') {
      ++c.pos;
      return Scalar(first, sign);
    }
    if (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.') {
      double second = parseRealAt(c);
      if (c.peek() == 'i') {
        ++c.pos;
        return Scalar(first, sign * second);
      }
    }
    c.pos = save;  // the +/- belongs to the caller (term separator)
  }
  return Scalar(first, 0.0);
}

}  // namespace

Scalar parseComplex(const std::string& text) {
  Cursor c{text};
  c.skipWs();
  bool paren = false;
  if (c.peek() == '(') {
    paren = true;
    ++c.pos;
  }
  Scalar z = parseComplexAt(c);
  if (paren) {
    c.skipWs();
    if (c.peek() != ')') c.err("expected ')'");
    ++c.pos;
  }
  c.skipWs();
  if (!c.done()) c.err("trailing input");
  return z;
}

// --------------------------------------------------------------------------
// Poly
// --------------------------------------------------------------------------

Poly Poly::one() { return constant(Scalar(1.0)); }

Poly Poly::constant(const Scalar& c) {
  Poly p;
  if (c != Scalar(0.0)) p.c_ = {c};
  return p;
}

Poly Poly::linear(const Scalar& c0, const Scalar& c1) {
  Poly p;
  p.c_ = {c0, c1};
  ToleranceConfig tol;
  p.trim(tol);
  return p;
}

Poly Poly::fromRoots(const std::vector<std::pair<Scalar, int>>& roots, const Scalar& lead) {
  std::vector<Scalar> c{Scalar(1.0)};
  for (const auto& [r, m] : roots) {
    for (int k = 0; k < m; ++k) {
      std::vector<Scalar> next(c.size() + 1, Scalar(0.0));
      for (size_t i = 0; i < c.size(); ++i) {
        next[i] -= r * c[i];
        next[i + 1] += c[i];
      }
      c = std::move(next);
    }
  }
  for (auto& x : c) x *= lead;
  Poly p;
  p.c_ = std::move(c);
  return p;
}

double Poly::maxMag() const {
  double m = 0.0;
  for (const auto& c : c_) m = std::max(m, std::abs(c));
  return m;
}

void Poly::trim(const ToleranceConfig& tol) {
  double cut = tol.zeroAt(maxMag());
  while (!c_.empty() && std::abs(c_.back()) <= cut) c_.pop_back();
}

Scalar Poly::eval(const Scalar& z) const {
  Scalar acc(0.0);
  for (size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
  return acc;
}

Poly Poly::derivative() const {
  Poly d;
  if (c_.size() <= 1) return d;
  d.c_.resize(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d.c_[i - 1] = c_[i] * Scalar(double(i));
  return d;
}

Poly Poly::deflate(const Scalar& root) const {
  if (c_.size() <= 1) return Poly();
  std::vector<Scalar> q(c_.size() - 1);
  Scalar carry = c_.back();
  for (size_t i = c_.size() - 1; i-- > 0;) {
    q[i] = carry;
    carry = c_[i] + carry * root;
  }
  Poly p;
  p.c_ = std::move(q);
  return p;
}

Poly Poly::reversed(int degreeHint, const ToleranceConfig& tol) const {
  std::vector<Scalar> r(degreeHint + 1, Scalar(0.0));
  for (size_t i = 0; i < c_.size(); ++i) {
    int k = degreeHint - static_cast<int>(i);
    if (k >= 0) r[k] = c_[i];
  }
  return Poly(std::move(r), tol);
}

Poly add(const Poly& a, const Poly& b, const ToleranceConfig& tol) {
  std::vector<Scalar> c(std::max(a.coeffs().size(), b.coeffs().size()), Scalar(0.0));
  for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
  return Poly(std::move(c), tol);
}

Poly sub(const Poly& a, const Poly& b, const ToleranceConfig& tol) {
  std::vector<Scalar> c(std::max(a.coeffs().size(), b.coeffs().size()), Scalar(0.0));
  for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
  return Poly(std::move(c), tol);
}

Poly mul(const Poly& a, const Poly& b, const ToleranceConfig& tol) {
  if (a.isZero() || b.isZero()) return Poly();
  std::vector<Scalar> c(a.coeffs().size() + b.coeffs().size() - 1, Scalar(0.0));
  for (size_t i = 0; i < a.coeffs().size(); ++i)
    for (size_t j = 0; j < b.coeffs().size(); ++j) c[i + j] += a.coeffs()[i] * b.coeffs()[j];
  return Poly(std::move(c), tol);
}

Poly scale(const Poly& a, const Scalar& s, const ToleranceConfig& tol) {
  std::vector<Scalar> c = a.coeffs();
  for (auto& x : c) x *= s;
  return Poly(std::move(c), tol);
}

Poly shift(const Poly& a, int k) {
  if (a.isZero() || k == 0) return a;
  std::vector<Scalar> c(a.coeffs().size() + k, Scalar(0.0));
  for (size_t i = 0; i < a.coeffs().size(); ++i) c[i + k] = a.coeffs()[i];
  Poly p;
  ToleranceConfig tol;
  return Poly(std::move(c), tol);
}

bool approxEqual(const Poly& a, const Poly& b, double eps) {
  size_t n = std::max(a.coeffs().size(), b.coeffs().size());
  double scale = std::max(a.maxMag(), b.maxMag());
  for (size_t i = 0; i < n; ++i)
    if (std::abs(a.coeff(i) - b.coeff(i)) > eps * (1.0 + scale)) return false;
  return true;
}

// --------------------------------------------------------------------------
// Root finding: simultaneous (Aberth-Ehrlich) iteration with deterministic
// restarts, followed by cluster merging and per-cluster Newton polish.
// --------------------------------------------------------------------------

namespace {

struct HornerPair {
  Scalar p, dp;
};

HornerPair evalWithDerivative(const std::vector<Scalar>& c, const Scalar& z) {
  Scalar p(0.0), dp(0.0);
  for (size_t i = c.size(); i-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[i];
  }
  return {p, dp};
}

// Floating noise floor of a Horner evaluation at z.
double evalNoise(const std::vector<Scalar>& c, const Scalar& z) {
  double az = std::abs(z), acc = 0.0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * az + std::abs(c[i]);
  return acc * 4.0 * std::numeric_limits<double>::epsilon();
}

// How far the true root could sit from an approximate root z: with p(z) at
// the noise floor eta and p^(k) the first derivative clearly above its own
// noise, a k-fold root moves by about (k! eta / |p^(k)|)^(1/k).
double rootUncertainty(const Poly& p, const Scalar& z) {
  double eta = evalNoise(p.coeffs(), z) + 1e-300;
  Poly d = p;
  double fact = 1.0;
  for (int k = 1; k <= p.degree(); ++k) {
    d = d.derivative();
    fact *= double(k);
    if (d.isZero()) break;
    double dk = std::abs(d.eval(z));
    if (dk > 16.0 * evalNoise(d.coeffs(), z))
      return 4.0 * std::pow(fact * eta / dk, 1.0 / double(k));
  }
  return 1e-3 * (1.0 + std::abs(z));  // fully degenerate at working precision
}

// Pulls a raw estimate onto the nearest (possibly multiple) root with the
// multiplicity-corrected Newton step z -= m * p / p'.
Scalar stabilizeRoot(const std::vector<Scalar>& c, Scalar z, int degree) {
  for (int iter = 0; iter < 60; ++iter) {
    auto [p, dp] = evalWithDerivative(c, z);
    if (std::abs(p) <= 4.0 * evalNoise(c, z)) break;
    if (std::abs(dp) < 1e-300) break;
    // Multiplicity estimate from p p'' / p'^2 ~ (m-1)/m.
    Scalar ddp(0.0), dpp(0.0), pp(0.0);
    for (size_t i = c.size(); i-- > 0;) {
      ddp = ddp * z + dpp;
      dpp = dpp * z + pp;
      pp = pp * z + c[i];
    }
    ddp *= 2.0;
    Scalar q = p * ddp / (dp * dp);
    double denom = std::abs(Scalar(1.0) - q);
    int m = 1;
    if (denom > 1e-3) m = std::clamp(int(std::lround(1.0 / denom)), 1, degree);
    Scalar step = double(m) * p / dp;
    Scalar zNew = z - step;
    if (std::abs(evalWithDerivative(c, zNew).p) > std::abs(p)) {
      zNew = z - p / dp;  // plain Newton fallback
      if (std::abs(evalWithDerivative(c, zNew).p) > std::abs(p)) break;
    }
    bool done = std::abs(zNew - z) < 1e-15 * (1.0 + std::abs(zNew));
    z = zNew;
    if (done) break;
  }
  return z;
}

bool aberthPass(const std::vector<Scalar>& c, std::vector<Scalar>& z, int maxIter) {
  const size_t n = z.size();
  for (int iter = 0; iter < maxIter; ++iter) {
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) {
      auto [p, dp] = evalWithDerivative(c, z[i]);
      if (std::abs(p) == 0.0) continue;
      if (std::abs(dp) < 1e-300) {
        z[i] += Scalar(1e-8, 1e-8);
        worst = 1.0;
        continue;
      }
      Scalar w = p / dp;
      Scalar s(0.0);
      for (size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        Scalar d = z[i] - z[j];
        if (std::abs(d) < 1e-300) d = Scalar(1e-14, 1e-14);
        s += Scalar(1.0) / d;
      }
      Scalar denom = Scalar(1.0) - w * s;
      Scalar step = (std::abs(denom) < 1e-14) ? w : w / denom;
      z[i] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (worst < 1e-14) return true;
  }
  return false;
}

std::vector<Scalar> initialRing(size_t n, double radius, std::mt19937_64* rng) {
  std::vector<Scalar> z(n);
  for (size_t i = 0; i < n; ++i) {
    double theta = 2.0 * M_PI * (double(i) + 0.35) / double(n) + 0.4;
    double r = radius * (0.8 + 0.4 * double((i * 37) % n) / std::max<size_t>(n, 1));
    if (rng) {
      std::uniform_real_distribution<double> U(-0.5, 0.5);
      theta += U(*rng);
      r *= 1.0 + 0.3 * U(*rng);
    }
    z[i] = std::polar(r, theta);
  }
  return z;
}

}  // namespace

std::vector<std::pair<Scalar, int>> polyRoots(const Poly& p, const ToleranceConfig& tol) {
  if (p.isZero()) fail(Errc::ZeroPolynomial, "polyRoots of the zero polynomial");

  // Peel off roots at the origin.
  std::vector<Scalar> c = p.coeffs();
  double cut = tol.zeroAt(p.maxMag());
  int originMult = 0;
  while (c.size() > 1 && std::abs(c.front()) <= cut) {
    c.erase(c.begin());
    ++originMult;
  }

  std::vector<Scalar> raw;
  if (c.size() > 1) {
    // Normalize to a monic-ish scale for stability.
    Scalar lead = c.back();
    for (auto& x : c) x /= lead;
    size_t n = c.size() - 1;

    if (n == 1) {
      raw.push_back(-c[0]);
    } else if (n == 2) {
      Scalar b = c[1], a = c[0];
      Scalar disc = std::sqrt(b * b - Scalar(4.0) * a);
      Scalar q = (std::abs(b + disc) > std::abs(b - disc)) ? -(b + disc) / Scalar(2.0)
                                                           : -(b - disc) / Scalar(2.0);
      // z^2 + b z + a with roots q and a/q (q chosen to avoid cancellation).
      raw.push_back(q);
      raw.push_back(std::abs(q) > 0 ? a / q : -b - q);
    } else {
      double cauchy = 0.0;
      for (size_t i = 0; i + 1 < c.size(); ++i) cauchy = std::max(cauchy, std::abs(c[i]));
      double radius = 1.0 + cauchy;

      std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
      bool ok = false;
      for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
        raw = initialRing(n, radius, attempt == 0 ? nullptr : &rng);
        ok = aberthPass(c, raw, 500);
        if (!ok) {
          // High-multiplicity roots converge only linearly; accept once every
          // residual sits at its evaluation noise floor (the stabilization and
          // clustering stages then place the roots properly).
          bool atFloor = true;
          for (const auto& z : raw)
            if (std::abs(evalWithDerivative(c, z).p) > 1e3 * evalNoise(c, z)) atFloor = false;
          ok = atFloor;
        }
      }
      if (!ok) {
        if (std::getenv("BERKLINE_DEBUG_ROOTS")) {
          fprintf(stderr, "[polyRoots fail] degree %d\n", int(n));
          for (size_t i = 0; i < c.size(); ++i)
            fprintf(stderr, "  c[%zu] = %.17g %+.17gi\n", i, c[i].real(), c[i].imag());
        }
        fail(Errc::NoConvergence,
             "root iteration exceeded its cap (degree " + std::to_string(n) + ")");
      }
    }
  }
  for (size_t i = 0; i < raw.size(); ++i)
    raw[i] = stabilizeRoot(p.coeffs(), raw[i], std::max(1, p.degree()));
  for (int i = 0; i < originMult; ++i) raw.push_back(Scalar(0.0));

  // An m-fold root is only located to about eps^(1/m), so cluster with a
  // condition-aware radius instead of the bare rootMatch.
  const size_t n = raw.size();
  std::vector<double> unc(n);
  for (size_t i = 0; i < n; ++i) unc[i] = rootUncertainty(p, raw[i]);

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (std::abs(raw[i] - raw[j]) <= std::max(tol.rootMatch, unc[i] + unc[j]))
        parent[find(int(i))] = find(int(j));

  // Per cluster: multiplicity = size, then a Newton polish on the (m-1)-th
  // derivative, where the root is simple again.
  std::vector<std::pair<Scalar, int>> out;
  std::vector<bool> seen(n, false);
  for (size_t i = 0; i < n; ++i) {
    int r = find(int(i));
    if (seen[r]) continue;
    seen[r] = true;
    Scalar mean(0.0);
    int m = 0;
    double rad = tol.rootMatch;
    for (size_t j = 0; j < n; ++j)
      if (find(int(j)) == r) {
        mean += raw[j];
        rad = std::max(rad, unc[j]);
        ++m;
      }
    mean /= double(m);

    Poly target = p;
    for (int k = 1; k < m; ++k) target = target.derivative();
    Scalar z = mean;
    for (int step = 0; step < 10; ++step) {
      auto [pv, dv] = evalWithDerivative(target.coeffs(), z);
      if (std::abs(dv) < 1e-300) break;
      Scalar delta = pv / dv;
      z -= delta;
      if (std::abs(delta) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z - mean) > 4.0 * rad) z = mean;  // polish escaped the cluster
    out.emplace_back(z, m);
  }

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  return out;
}

// --------------------------------------------------------------------------
// RatFunc
// --------------------------------------------------------------------------

RatFunc RatFunc::raw(Poly num, Poly den) {
  RatFunc f;
  f.num_ = std::move(num);
  f.den_ = std::move(den);
  return f;
}

RatFunc RatFunc::constant(const Scalar& c) { return raw(Poly::constant(c), Poly::one()); }

RatFunc RatFunc::identity() { return raw(Poly::linear(Scalar(0.0), Scalar(1.0)), Poly::one()); }

ExtComplex RatFunc::eval(const Scalar& z) const {
  Scalar n = num_.eval(z), d = den_.eval(z);
  double scale = std::max({std::abs(n), std::abs(d), 1e-300});
  if (std::abs(d) <= 1e-14 * scale) return ExtComplex::infinity();
  return ExtComplex(n / d);
}

ExtComplex RatFunc::evalAtInf() const {
  int dn = num_.degree(), dd = den_.degree();
  if (num_.isZero()) return ExtComplex(Scalar(0.0));
  if (dn > dd) return ExtComplex::infinity();
  if (dn < dd) return ExtComplex(Scalar(0.0));
  return ExtComplex(num_.leading() / den_.leading());
}

ExtComplex RatFunc::eval(const ExtComplex& z) const { return z.inf ? evalAtInf() : eval(z.v); }

namespace {

// Zeroes coefficients (and real/imaginary parts) that sit below the
// tolerance; deflation by matched roots leaves such dust behind.
Poly denoise(const Poly& p, const ToleranceConfig& tol) {
  double cut = tol.zeroAt(p.maxMag());
  std::vector<Scalar> c = p.coeffs();
  for (auto& x : c) {
    double re = std::abs(x.real()) <= cut ? 0.0 : x.real();
    double im = std::abs(x.imag()) <= cut ? 0.0 : x.imag();
    x = Scalar(re, im);
  }
  return Poly(std::move(c), tol);
}

}  // namespace

RatFunc ratCancel(const Poly& num, const Poly& den, const ToleranceConfig& tol) {
  if (den.isZero()) fail(Errc::ZeroDenominator, "ratCancel with zero denominator");
  if (num.isZero()) return RatFunc();

  Poly n = num, d = den;
  if (d.degree() > 0) {
    auto rootsN = polyRoots(n, tol);
    auto rootsD = polyRoots(d, tol);
    for (auto& [rd, md] : rootsD) {
      if (md == 0) continue;
      for (auto& [rn, mn] : rootsN) {
        if (mn == 0) continue;
        if (std::abs(rd - rn) <= tol.rootMatch) {
          int k = std::min(mn, md);
          Scalar r = (rd + rn) / 2.0;
          for (int i = 0; i < k; ++i) {
            n = n.deflate(r);
            d = d.deflate(r);
          }
          mn -= k;
          md -= k;
          if (md == 0) break;
        }
      }
    }
    n.trim(tol);
    d.trim(tol);
    if (d.isZero()) fail(Errc::ZeroDenominator, "cancellation emptied the denominator");
    if (n.isZero()) return RatFunc();
  }
  Scalar lead = d.leading();
  return RatFunc::raw(denoise(scale(n, Scalar(1.0) / lead, tol), tol),
                      denoise(scale(d, Scalar(1.0) / lead, tol), tol));
}

RatFunc ratCancel(const RatFunc& f, const ToleranceConfig& tol) {
  return ratCancel(f.num(), f.den(), tol);
}

RatFunc ratCompose(const RatFunc& outer, const RatFunc& inner, const ToleranceConfig& tol) {
  int m = std::max(outer.num().degree(), outer.den().degree());
  if (m < 0) return RatFunc();
  // Homogenize: P(A/B) * B^m = sum_k P_k A^k B^(m-k).
  std::vector<Poly> powA(m + 1), powB(m + 1);
  powA[0] = Poly::one();
  powB[0] = Poly::one();
  for (int k = 1; k <= m; ++k) {
    powA[k] = mul(powA[k - 1], inner.num(), tol);
    powB[k] = mul(powB[k - 1], inner.den(), tol);
  }
  Poly n, d;
  for (int k = 0; k <= m; ++k) {
    Poly basis = mul(powA[k], powB[m - k], tol);
    n = add(n, scale(basis, outer.num().coeff(k), tol), tol);
    d = add(d, scale(basis, outer.den().coeff(k), tol), tol);
  }
  if (d.isZero()) {
    if (n.isZero()) fail(Errc::PrecisionExhausted, "composition is 0/0 at every point");
    fail(Errc::ZeroDenominator, "composition is identically infinity");
  }
  return ratCancel(n, d, tol);
}

RatFunc ratAdd(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol) {
  Poly n = add(mul(a.num(), b.den(), tol), mul(b.num(), a.den(), tol), tol);
  Poly d = mul(a.den(), b.den(), tol);
  return ratCancel(n, d, tol);
}

RatFunc ratSub(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol) {
  Poly n = sub(mul(a.num(), b.den(), tol), mul(b.num(), a.den(), tol), tol);
  Poly d = mul(a.den(), b.den(), tol);
  return ratCancel(n, d, tol);
}

RatFunc ratMul(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol) {
  return ratCancel(mul(a.num(), b.num(), tol), mul(a.den(), b.den(), tol), tol);
}

RatFunc ratDiv(const RatFunc& a, const RatFunc& b, const ToleranceConfig& tol) {
  if (b.isZero()) fail(Errc::ZeroDenominator, "division by the zero function");
  return ratCancel(mul(a.num(), b.den(), tol), mul(a.den(), b.num(), tol), tol);
}

RatFunc ratNeg(const RatFunc& a) { return RatFunc::raw(scale(a.num(), Scalar(-1.0), {}), a.den()); }

RatFunc ratDerivative(const RatFunc& a, const ToleranceConfig& tol) {
  Poly n = sub(mul(a.num().derivative(), a.den(), tol), mul(a.num(), a.den().derivative(), tol), tol);
  Poly d = mul(a.den(), a.den(), tol);
  return ratCancel(n, d, tol);
}

std::optional<Scalar> constantValue(const RatFunc& f, const ToleranceConfig& tol) {
  if (f.isZero()) return Scalar(0.0);
  if (f.num().degree() != f.den().degree()) return std::nullopt;
  Scalar c = f.num().leading() / f.den().leading();
  Poly diff = sub(f.num(), scale(f.den(), c, tol), tol);
  double scaleRef = std::max(f.num().maxMag(), f.den().maxMag() * std::abs(c));
  if (diff.isZero() || diff.maxMag() <= tol.zeroAt(scaleRef)) return c;
  return std::nullopt;
}

RatFunc swapChart(const RatFunc& f, const ToleranceConfig& tol) {
  int m = f.degree();
  Poly rn = f.num().reversed(m, tol);
  Poly rd = f.den().reversed(m, tol);
  if (rn.isZero()) fail(Errc::ZeroDenominator, "chart swap of the zero function");
  return ratCancel(rd, rn, tol);
}

int fixedPointMultiplicity(const RatFunc& f, const ExtComplex& c, const ToleranceConfig& tol) {
  if (c.inf) {
    RatFunc g = swapChart(f, tol);
    return fixedPointMultiplicity(g, ExtComplex(Scalar(0.0)), tol);
  }
  Poly g = sub(f.num(), mul(Poly::linear(Scalar(0.0), Scalar(1.0)), f.den(), tol), tol);
  if (g.isZero()) return 1;  // identity map: the sensible convention here
  double scaleRef = g.maxMag() * std::pow(1.0 + std::abs(c.v), double(std::max(0, g.degree())));
  int order = 0;
  Poly h = g;
  double fact = 1.0;
  while (!h.isZero()) {
    if (std::abs(h.eval(c.v)) / fact > 1e3 * tol.zeroAt(scaleRef)) break;
    ++order;
    fact *= double(order);
    h = h.derivative();
  }
  return order;
}

std::vector<std::pair<ExtComplex, int>> criticalPointsOf(const RatFunc& f,
                                                         const ToleranceConfig& tol) {
  int d = f.degree();
  Poly w = sub(mul(f.num().derivative(), f.den(), tol), mul(f.num(), f.den().derivative(), tol),
               tol);
  std::vector<std::pair<ExtComplex, int>> out;
  int finiteTotal = 0;
  if (!w.isZero()) {
    for (const auto& [r, m] : polyRoots(w, tol)) {
      out.emplace_back(ExtComplex(r), m);
      finiteTotal += m;
    }
  }
  int infMult = (2 * d - 2) - finiteTotal;
  if (infMult > 0) out.emplace_back(ExtComplex::infinity(), infMult);
  return out;
}

// --------------------------------------------------------------------------
// Formatting
// --------------------------------------------------------------------------

std::string formatPoly(const Poly& p, const std::string& var, int digits) {
  if (p.isZero()) return "0";
  std::string s;
  bool first = true;
  for (size_t i = 0; i < p.coeffs().size(); ++i) {
    Scalar c = p.coeffs()[i];
    if (c == Scalar(0.0)) continue;
    std::string coefStr;
    bool negReal = (c.imag() == 0.0 && c.real() < 0.0);
    Scalar shown = negReal ? -c : c;
    bool needsParens = shown.real() != 0.0 && shown.imag() != 0.0;
    coefStr = formatComplex(shown, digits);
    if (needsParens) coefStr = "(" + coefStr + ")";
    if (first) {
      if (negReal) s += "-";
      first = false;
    } else {
      s += negReal ? " - " : " + ";
    }
    if (i == 0) {
      s += coefStr;
    } else {
      bool unit = (shown == Scalar(1.0));
      s += unit ? var : coefStr + "*" + var;
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s.empty() ? "0" : s;
}

std::string formatRatFunc(const RatFunc& f, const std::string& var, int digits) {
  if (f.den().degree() == 0 && std::abs(f.den().leading() - Scalar(1.0)) < 1e-15)
    return formatPoly(f.num(), var, digits);
  return "(" + formatPoly(f.num(), var, digits) + ")/(" + formatPoly(f.den(), var, digits) + ")";
}

}  // namespace berkline
