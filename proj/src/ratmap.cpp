#include "berkline/ratmap.hpp"

#include <algorithm>
#include <cmath>

namespace berkline {

LPoly lpolyAdd(const LPoly& a, const LPoly& b, const ToleranceConfig& tol) {
  LPoly c(std::max(a.size(), b.size()), CSeries::zeroTo(exactPrec()));
  for (size_t i = 0; i < c.size(); ++i) {
    if (i < a.size() && i < b.size())
      c[i] = add(a[i], b[i], tol);
    else if (i < a.size())
      c[i] = a[i];
    else
      c[i] = b[i];
  }
  return c;
}

LPoly lpolyMul(const LPoly& a, const LPoly& b, const ToleranceConfig& tol) {
  if (a.empty() || b.empty()) return {};
  LPoly c(a.size() + b.size() - 1, CSeries());
  // Accumulate precisions correctly: start each slot as an exact zero, then
  // fold in the pairwise products.
  for (auto& s : c) s = CSeries::zeroTo(exactPrec());
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].isZero() && a[i].prec() == exactPrec()) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j].isZero() && b[j].prec() == exactPrec()) continue;
      c[i + j] = add(c[i + j], mul(a[i], b[j], tol), tol);
    }
  }
  return c;
}

LPoly lpolyScale(const LPoly& a, const CSeries& s, const ToleranceConfig& tol) {
  LPoly c(a.size(), CSeries::zeroTo(exactPrec()));
  for (size_t i = 0; i < a.size(); ++i) c[i] = mul(a[i], s, tol);
  return c;
}

// --------------------------------------------------------------------------
// ProjPointL
// --------------------------------------------------------------------------

ProjPointL ProjPointL::make(CSeries X, CSeries Y, const ToleranceConfig& tol) {
  if (X.isZero() && Y.isZero())
    fail(Errc::PrecisionExhausted, "projective point indeterminate at this precision");
  ExpQ m(0);
  if (X.isZero())
    m = Y.val().bound();
  else if (Y.isZero())
    m = X.val().bound();
  else
    m = ExpQ::min(X.val().bound(), Y.val().bound());
  ProjPointL p;
  p.X_ = shiftSeries(X, -m);
  p.Y_ = shiftSeries(Y, -m);
  (void)tol;
  return p;
}

ProjPointL ProjPointL::affine(const CSeries& z, const ToleranceConfig& tol) {
  return make(z, CSeries::constant(Scalar(1.0), exactPrec(), tol), tol);
}

ProjPointL ProjPointL::infinity() {
  ProjPointL p;
  ToleranceConfig tol;
  p.X_ = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  p.Y_ = CSeries::zeroTo(exactPrec());
  return p;
}

CSeries ProjPointL::affineValue(const ToleranceConfig& tol) const { return div(X_, Y_, tol); }

bool ProjPointL::eq(const ProjPointL& o, const ToleranceConfig& tol) const {
  CSeries cross = sub(mul(X_, o.Y_, tol), mul(o.X_, Y_, tol), tol);
  return cross.isZero();
}

// --------------------------------------------------------------------------
// RationalMapL
// --------------------------------------------------------------------------

namespace {

bool exactlyZero(const CSeries& s) { return s.isZero() && s.prec() == exactPrec(); }

void trimTopExactZeros(LPoly& p) {
  while (!p.empty() && exactlyZero(p.back())) p.pop_back();
}

}  // namespace

RationalMapL RationalMapL::make(LPoly num, LPoly den, const ToleranceConfig& tol,
                                bool allowConstant) {
  (void)tol;
  trimTopExactZeros(num);
  trimTopExactZeros(den);
  if (num.empty() && den.empty()) fail(Errc::InvalidArgument, "empty rational map");
  int d = int(std::max(num.size(), den.size())) - 1;
  num.resize(d + 1, CSeries::zeroTo(exactPrec()));
  den.resize(d + 1, CSeries::zeroTo(exactPrec()));
  if (num[d].isZero() && den[d].isZero())
    fail(Errc::PrecisionExhausted, "both top coefficients are zero to precision");
  if (d < 1 && !allowConstant)
    fail(Errc::InvalidArgument, "dynamical rational maps need degree >= 1");
  RationalMapL phi;
  phi.num_ = std::move(num);
  phi.den_ = std::move(den);
  phi.degree_ = d;
  return phi;
}

ExpQ RationalMapL::minCoeffPrec() const {
  ExpQ m = exactPrec();
  for (const auto& s : num_) m = ExpQ::min(m, s.prec());
  for (const auto& s : den_) m = ExpQ::min(m, s.prec());
  return m;
}

ProjPointL evalMap(const RationalMapL& phi, const ProjPointL& z, const ToleranceConfig& tol) {
  int d = phi.degree();
  std::vector<CSeries> powX(d + 1), powY(d + 1);
  powX[0] = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  powY[0] = powX[0];
  for (int k = 1; k <= d; ++k) {
    powX[k] = mul(powX[k - 1], z.X(), tol);
    powY[k] = mul(powY[k - 1], z.Y(), tol);
  }
  CSeries N = CSeries::zeroTo(exactPrec()), D = N;
  for (int k = 0; k <= d; ++k) {
    CSeries basis = mul(powX[k], powY[d - k], tol);
    if (!exactlyZero(phi.num()[k])) N = add(N, mul(phi.num()[k], basis, tol), tol);
    if (!exactlyZero(phi.den()[k])) D = add(D, mul(phi.den()[k], basis, tol), tol);
  }
  return ProjPointL::make(std::move(N), std::move(D), tol);
}

CSeries evalAffine(const RationalMapL& phi, const CSeries& z, const ToleranceConfig& tol) {
  CSeries N = CSeries::zeroTo(exactPrec()), D = N;
  CSeries pw = CSeries::constant(Scalar(1.0), exactPrec(), tol);
  for (int k = 0; k <= phi.degree(); ++k) {
    if (!exactlyZero(phi.num()[k])) N = add(N, mul(phi.num()[k], pw, tol), tol);
    if (!exactlyZero(phi.den()[k])) D = add(D, mul(phi.den()[k], pw, tol), tol);
    if (k < phi.degree()) pw = mul(pw, z, tol);
  }
  return div(N, D, tol);
}

RationalMapL composeMaps(const RationalMapL& phi, const RationalMapL& psi,
                         const ToleranceConfig& tol, int degreeCap) {
  long target = long(phi.degree()) * long(psi.degree());
  if (target > degreeCap)
    fail(Errc::DegreeCapExceeded,
         "composite degree " + std::to_string(target) + " exceeds cap " +
             std::to_string(degreeCap));
  int d = phi.degree();
  std::vector<LPoly> powA(d + 1), powB(d + 1);
  powA[0] = {CSeries::constant(Scalar(1.0), exactPrec(), tol)};
  powB[0] = powA[0];
  for (int k = 1; k <= d; ++k) {
    powA[k] = lpolyMul(powA[k - 1], psi.num(), tol);
    powB[k] = lpolyMul(powB[k - 1], psi.den(), tol);
  }
  LPoly N, D;
  for (int k = 0; k <= d; ++k) {
    LPoly basis = lpolyMul(powA[k], powB[d - k], tol);
    if (!exactlyZero(phi.num()[k])) N = lpolyAdd(N, lpolyScale(basis, phi.num()[k], tol), tol);
    if (!exactlyZero(phi.den()[k])) D = lpolyAdd(D, lpolyScale(basis, phi.den()[k], tol), tol);
  }
  return RationalMapL::make(std::move(N), std::move(D), tol, true);
}

RationalMapL iterateMap(const RationalMapL& phi, int n, const ToleranceConfig& tol,
                        int degreeCap) {
  if (n < 1) fail(Errc::InvalidArgument, "iterate count must be >= 1");
  double dn = std::pow(double(phi.degree()), double(n));
  if (dn > double(degreeCap))
    fail(Errc::DegreeCapExceeded, "iterate degree exceeds cap " + std::to_string(degreeCap));
  RationalMapL acc = phi;
  for (int k = 1; k < n; ++k) acc = composeMaps(phi, acc, tol, degreeCap);
  return acc;
}

RationalMapL derivativeMap(const RationalMapL& phi, const ToleranceConfig& tol) {
  auto differentiate = [&](const LPoly& p) {
    LPoly d;
    for (size_t k = 1; k < p.size(); ++k)
      d.push_back(scaleSeries(p[k], Scalar(double(k)), tol));
    return d;
  };
  LPoly n = lpolyAdd(
      lpolyMul(differentiate(phi.num()), phi.den(), tol),
      lpolyScale(lpolyMul(phi.num(), differentiate(phi.den()), tol),
                 CSeries::constant(Scalar(-1.0), exactPrec(), tol), tol),
      tol);
  LPoly d = lpolyMul(phi.den(), phi.den(), tol);
  return RationalMapL::make(std::move(n), std::move(d), tol, true);
}

// --------------------------------------------------------------------------
// Reduction at t = 0
// --------------------------------------------------------------------------

ReduceResult reduceModT(const RationalMapL& phi, const ToleranceConfig& tol) {
  bool any = false;
  ExpQ m(0);
  auto scan = [&](const LPoly& p) {
    for (const auto& s : p)
      if (!s.isZero()) {
        ExpQ v = s.val().bound();
        m = any ? ExpQ::min(m, v) : v;
        any = true;
      }
  };
  scan(phi.num());
  scan(phi.den());
  if (!any) fail(Errc::PrecisionExhausted, "all coefficients are zero to precision");
  // A coefficient whose vanishing is only known to a precision <= m could
  // still contribute at level m.
  auto checkKnown = [&](const LPoly& p) {
    for (const auto& s : p)
      if (s.isZero() && !(m < s.prec()))
        fail(Errc::PrecisionExhausted, "coefficient with undetermined valuation at reduction level");
  };
  checkKnown(phi.num());
  checkKnown(phi.den());

  int d = phi.degree();
  std::vector<Scalar> nc(d + 1), dc(d + 1);
  for (int k = 0; k <= d; ++k) {
    nc[k] = phi.num()[k].coefAt(m);
    dc[k] = phi.den()[k].coefAt(m);
  }
  Poly N(std::move(nc), tol), D(std::move(dc), tol);

  ReduceResult out;
  if (N.isZero() || D.isZero()) {
    // Constant 0 (or constant infinity) reduction: the entire other side is
    // the common factor.
    const Poly& H = N.isZero() ? D : N;
    for (const auto& [r, mult] : polyRoots(H, tol)) out.holes.entries.push_back({ExtComplex(r), mult});
    int infMult = d - H.degree();
    if (infMult > 0) out.holes.entries.push_back({ExtComplex::infinity(), infMult});
    if (N.isZero()) {
      out.reduced = RatFunc();  // constant 0
    } else {
      out.reduced = RatFunc::constant(Scalar(1.0));
      out.reducedIsInfinity = true;
    }
    return out;
  }

  auto rootsN = polyRoots(N, tol);
  auto rootsD = polyRoots(D, tol);
  Poly n = N, dd = D;
  for (auto& [rd, md] : rootsD) {
    if (md == 0) continue;
    for (auto& [rn, mn] : rootsN) {
      if (mn == 0) continue;
      if (std::abs(rd - rn) <= tol.rootMatch) {
        int k = std::min(mn, md);
        Scalar r = (rd + rn) / 2.0;
        out.holes.entries.push_back({ExtComplex(r), k});
        for (int i = 0; i < k; ++i) {
          n = n.deflate(r);
          dd = dd.deflate(r);
        }
        mn -= k;
        md -= k;
        if (md == 0) break;
      }
    }
  }
  n.trim(tol);
  dd.trim(tol);
  int infMult = d - std::max(N.degree(), D.degree());
  if (infMult > 0) out.holes.entries.push_back({ExtComplex::infinity(), infMult});
  Scalar lead = dd.leading();
  out.reduced = RatFunc::raw(scale(n, Scalar(1.0) / lead, tol), scale(dd, Scalar(1.0) / lead, tol));
  return out;
}

// --------------------------------------------------------------------------
// Bicritical critical points
// --------------------------------------------------------------------------

namespace {

// Tries to read p as alpha * (z - root)^d; returns the root on success.
std::optional<CSeries> asLinearPower(const LPoly& p, int d, const ToleranceConfig& tol) {
  if (int(p.size()) - 1 != d) return std::nullopt;
  const CSeries& top = p[d];
  if (top.isZero()) return std::nullopt;
  CSeries root = scaleSeries(div(p[d - 1], top, tol), Scalar(-1.0 / double(d)), tol);
  // Expand alpha*(z - root)^d and compare coefficient by coefficient.
  LPoly lin = {neg(root), CSeries::constant(Scalar(1.0), exactPrec(), tol)};
  LPoly pw = {CSeries::constant(Scalar(1.0), exactPrec(), tol)};
  for (int k = 0; k < d; ++k) pw = lpolyMul(pw, lin, tol);
  for (int k = 0; k <= d; ++k) {
    CSeries diff = sub(p[k], mul(top, pw[k], tol), tol);
    if (!diff.isZero()) return std::nullopt;
  }
  return root;
}

}  // namespace

std::pair<ProjPointL, ProjPointL> criticalPointsBicritical(const RationalMapL& phi,
                                                           const ToleranceConfig& tol) {
  int d = phi.degree();
  if (d < 2) fail(Errc::NotBicritical, "degree < 2 maps have no bicritical structure");

  bool supported = true;
  for (int k = 1; k < d && supported; ++k)
    if (!phi.num()[k].isZero() || !phi.den()[k].isZero()) supported = false;
  if (supported)
    return {ProjPointL::affine(CSeries::make({}, exactPrec(), tol), tol), ProjPointL::infinity()};

  auto critOf = [&](const LPoly& side) -> std::optional<ProjPointL> {
    LPoly trimmed = side;
    while (!trimmed.empty() && trimmed.back().isZero()) trimmed.pop_back();
    if (int(trimmed.size()) - 1 == 0) return ProjPointL::infinity();
    if (auto root = asLinearPower(trimmed, d, tol)) return ProjPointL::affine(*root, tol);
    return std::nullopt;
  };
  auto c1 = critOf(phi.num());
  auto c2 = critOf(phi.den());
  if (c1 && c2 && !c1->eq(*c2, tol)) return {*c1, *c2};
  fail(Errc::NotBicritical, "map is not in a recognizable bicritical shape");
}

ComplexRatMap instantiateAt(const RationalMapL& phi, const Scalar& t, const ToleranceConfig& tol) {
  std::vector<Scalar> nc, dc;
  for (const auto& s : phi.num()) nc.push_back(evalSeriesNumeric(s, t));
  for (const auto& s : phi.den()) dc.push_back(evalSeriesNumeric(s, t));
  return RatFunc::raw(Poly(std::move(nc), tol), Poly(std::move(dc), tol));
}

// --------------------------------------------------------------------------
// Literal format
// --------------------------------------------------------------------------

namespace {

std::vector<std::string> parseStringArray(const std::string& s, size_t& pos) {
  auto err = [&](const std::string& what) {
    fail(Errc::SyntaxError, what + " at position " + std::to_string(pos) + " in ratmap literal");
  };
  std::vector<std::string> out;
  while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
  if (pos >= s.size() || s[pos] != '[') err("expected '['");
  ++pos;
  while (true) {
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      break;
    }
    if (pos >= s.size() || s[pos] != '"') err("expected '\"'");
    size_t end = s.find('"', pos + 1);
    if (end == std::string::npos) err("unterminated string");
    out.push_back(s.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    if (pos < s.size() && s[pos] == ',') ++pos;
  }
  return out;
}

}  // namespace

RationalMapL parseRatMapLiteral(const std::string& text, const ToleranceConfig& tol,
                                ExpQ defaultPrec, std::int64_t ramificationBound) {
  auto err = [&](const std::string& what) { fail(Errc::SyntaxError, what + " in ratmap literal"); };
  size_t pos = text.find("ratmap");
  if (pos == std::string::npos) err("expected 'ratmap'");
  pos = text.find('{', pos);
  if (pos == std::string::npos) err("expected '{'");
  ++pos;
  std::vector<std::string> numStrs, denStrs;
  while (true) {
    while (pos < text.size() && (std::isspace((unsigned char)text[pos]) || text[pos] == ',')) ++pos;
    if (pos >= text.size()) err("unterminated literal");
    if (text[pos] == '}') break;
    size_t eq = text.find('=', pos);
    if (eq == std::string::npos) err("expected '='");
    std::string key = text.substr(pos, eq - pos);
    key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return std::isspace((unsigned char)c); }),
              key.end());
    pos = eq + 1;
    auto arr = parseStringArray(text, pos);
    if (key == "num")
      numStrs = arr;
    else if (key == "den")
      denStrs = arr;
    else
      err("unknown key '" + key + "'");
  }
  LPoly num, den;
  for (const auto& s : numStrs) num.push_back(parseSeries(s, tol, defaultPrec, ramificationBound));
  for (const auto& s : denStrs) den.push_back(parseSeries(s, tol, defaultPrec, ramificationBound));
  return RationalMapL::make(std::move(num), std::move(den), tol);
}

std::string printRatMapLiteral(const RationalMapL& phi, int digits) {
  auto side = [&](const LPoly& p) {
    std::string s = "[";
    for (size_t i = 0; i < p.size(); ++i) {
      if (i) s += ", ";
      s += "\"" + printSeries(p[i], digits) + "\"";
    }
    return s + "]";
  };
  return "ratmap { num = " + side(phi.num()) + ", den = " + side(phi.den()) + " }";
}

}  // namespace berkline
