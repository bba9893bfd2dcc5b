#include "berkline/puiseux.hpp"

#include <cctype>
#include <cmath>

namespace berkline {

bool approxEqual(const CSeries& a, const CSeries& b, double eps) {
  if (a.terms().size() != b.terms().size()) return false;
  double scale = 0.0;
  for (const auto& t : a.terms()) scale = std::max(scale, std::abs(t.coef));
  for (const auto& t : b.terms()) scale = std::max(scale, std::abs(t.coef));
  for (size_t i = 0; i < a.terms().size(); ++i) {
    if (a.terms()[i].exp != b.terms()[i].exp) return false;
    if (std::abs(a.terms()[i].coef - b.terms()[i].coef) > eps * (1.0 + scale)) return false;
  }
  return true;
}

RSeries embedSeries(const CSeries& s) {
  std::vector<RSeries::Term> t;
  t.reserve(s.terms().size());
  for (const auto& x : s.terms()) t.push_back({x.exp, RatFunc::constant(x.coef)});
  ToleranceConfig tol;
  return RSeries::make(std::move(t), s.prec(), tol);
}

Scalar evalSeriesNumeric(const CSeries& s, const Scalar& t) {
  Scalar acc(0.0);
  for (const auto& term : s.terms()) {
    acc += term.coef * std::pow(t, term.exp.toDouble());
  }
  return acc;
}

RSeries inverse(const RSeries& b, const ToleranceConfig& tol) {
  if (b.isZero()) fail(Errc::DivisionByZeroSeries, "inverse of a series that is zero to precision");

  // Reduce the coefficients; the structured path needs them polynomial.
  std::vector<std::pair<ExpQ, Poly>> coefs;
  bool polynomial = true;
  for (const auto& term : b.terms()) {
    RatFunc c = ratCancel(term.coef, tol);
    if (c.den().degree() > 0) {
      polynomial = false;
      break;
    }
    // Monic degree-0 denominator is exactly 1.
    coefs.push_back({term.exp, c.num()});
  }
  if (!polynomial) return inverse<RatFuncField>(b, tol);

  ExpQ v = coefs.front().first;
  Poly q0 = coefs.front().second;
  ExpQ relPrec = b.prec() - v;

  // Terms of the expansion as numerator polynomials over powers of q0.
  struct Tm {
    ExpQ e;
    Poly num;
    int pow;
  };
  auto mergeInto = [&](std::vector<Tm>& dst, const std::vector<Tm>& src) {
    for (const auto& s : src) {
      bool merged = false;
      for (auto& d : dst) {
        if (d.e == s.e) {
          int target = std::max(d.pow, s.pow);
          Poly dn = d.num, sn = s.num;
          for (int k = d.pow; k < target; ++k) dn = mul(dn, q0, tol);
          for (int k = s.pow; k < target; ++k) sn = mul(sn, q0, tol);
          d.num = add(dn, sn, tol);
          d.pow = target;
          merged = true;
          break;
        }
      }
      if (!merged) dst.push_back(s);
    }
    std::erase_if(dst, [](const Tm& t) { return t.num.isZero(); });
    std::sort(dst.begin(), dst.end(), [](const Tm& a, const Tm& b) { return a.e < b.e; });
  };

  std::vector<Tm> h;
  for (size_t i = 1; i < coefs.size(); ++i)
    h.push_back({coefs[i].first - v, scale(coefs[i].second, Scalar(-1.0), tol), 1});

  std::vector<Tm> acc{{ExpQ(0), Poly::one(), 0}};
  std::vector<Tm> pw{{ExpQ(0), Poly::one(), 0}};
  for (int guard = 0; guard < 4096 && !h.empty(); ++guard) {
    std::vector<Tm> next;
    for (const auto& x : pw)
      for (const auto& y : h) {
        ExpQ e = x.e + y.e;
        if (!(e < relPrec)) continue;
        next.push_back({e, mul(x.num, y.num, tol), x.pow + y.pow});
      }
    std::vector<Tm> merged;
    mergeInto(merged, next);
    pw = std::move(merged);
    if (pw.empty()) break;
    mergeInto(acc, pw);
  }

  // Lift everything onto one shared denominator q0^(K+1); sharing the same
  // coefficient vector keeps later equal-denominator merges on the fast path.
  int K = 0;
  for (const auto& t : acc) K = std::max(K, t.pow);
  std::vector<Poly> q0pow(K + 2);
  q0pow[0] = Poly::one();
  for (int k = 1; k <= K + 1; ++k) q0pow[k] = mul(q0pow[k - 1], q0, tol);

  std::vector<RSeries::Term> out;
  for (const auto& t : acc) {
    Poly num = mul(t.num, q0pow[K - t.pow], tol);
    out.push_back({t.e - v, RatFunc::raw(std::move(num), q0pow[K + 1])});
  }
  return RSeries::make(std::move(out), relPrec - v, tol);
}

// --------------------------------------------------------------------------
// Parsing
// --------------------------------------------------------------------------

namespace {

struct SCur {
  const std::string& s;
  size_t pos = 0;
  bool done() const { return pos >= s.size(); }
  char peek(size_t ahead = 0) const { return pos + ahead < s.size() ? s[pos + ahead] : '\0'; }
  void skipWs() {
    while (!done() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void err(const std::string& what) const {
    fail(Errc::SyntaxError, what + " at position " + std::to_string(pos) + " in \"" + s + "\"");
  }
};

std::int64_t parseInt(SCur& c) {
  c.skipWs();
  size_t start = c.pos;
  if (c.peek() == '+' || c.peek() == '-') ++c.pos;
  if (!std::isdigit(static_cast<unsigned char>(c.peek()))) c.err("expected integer");
  while (std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.pos;
  return std::stoll(c.s.substr(start, c.pos - start));
}

ExpQ parseExp(SCur& c, std::int64_t bound) {
  c.skipWs();
  ExpQ e;
  if (c.peek() == '(') {
    ++c.pos;
    std::int64_t n = parseInt(c);
    c.skipWs();
    if (!c.consume('/')) c.err("expected '/' in rational exponent");
    std::int64_t d = parseInt(c);
    if (d <= 0) c.err("exponent denominator must be positive");
    c.skipWs();
    if (!c.consume(')')) c.err("expected ')' after rational exponent");
    e = ExpQ(n, d);
  } else {
    e = ExpQ(parseInt(c));
  }
  if (e.den() > bound)
    fail(Errc::RamificationBound, "exponent denominator " + std::to_string(e.den()) +
                                      " exceeds the ramification bound " + std::to_string(bound));
  return e;
}

// One term: returns (exponent, coefficient); handles coef, coef*t^e, t^e, t.
CSeries::Term parseTerm(SCur& c, std::int64_t bound) {
  c.skipWs();
  Scalar coef(1.0);
  bool sawCoef = false;
  if (c.peek() == '(') {
    // Parenthesized complex coefficient: hand the slice to the literal parser.
    ++c.pos;
    size_t depth = 1, end = c.pos;
    while (end < c.s.size() && depth > 0) {
      if (c.s[end] == '(') ++depth;
      if (c.s[end] == ')') --depth;
      ++end;
    }
    if (depth != 0) c.err("unbalanced '('");
    coef = parseComplex(c.s.substr(c.pos, end - 1 - c.pos));
    c.pos = end;
    sawCoef = true;
  } else if (c.peek() != 't') {
    // bare complex literal without internal +/- (those are term separators)
    size_t start = c.pos;
    if (c.peek() == 'i') {
      ++c.pos;
      coef = Scalar(0.0, 1.0);
    } else {
      bool digits = false;
      while (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.') {
        ++c.pos;
        digits = true;
      }
      if ((c.peek() == 'e' || c.peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(c.peek(1))) ||
           ((c.peek(1) == '+' || c.peek(1) == '-') &&
            std::isdigit(static_cast<unsigned char>(c.peek(2)))))) {
        c.pos += (c.peek(1) == '+' || c.peek(1) == '-') ? 2 : 1;
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.pos;
      }
      if (!digits) c.err("expected coefficient or 't'");
      double x = std::stod(c.s.substr(start, c.pos - start));
      if (c.peek() == 'i') {
        ++c.pos;
        coef = Scalar(0.0, x);
      } else {
        coef = Scalar(x, 0.0);
      }
    }
    sawCoef = true;
  }

  c.skipWs();
  if (sawCoef) c.consume('*');
  c.skipWs();
  ExpQ e(0);
  if (c.peek() == 't') {
    ++c.pos;
    if (c.consume('^'))
      e = parseExp(c, bound);
    else
      e = ExpQ(1);
  } else if (!sawCoef) {
    c.err("expected term");
  }
  return {e, coef};
}

}  // namespace

CSeries parseSeries(const std::string& text, const ToleranceConfig& tol, ExpQ defaultPrec,
                    std::int64_t ramificationBound) {
  SCur c{text};
  std::vector<CSeries::Term> terms;
  ExpQ prec = defaultPrec;
  bool sawTail = false;

  c.skipWs();
  if (c.done()) c.err("empty series");
  bool negate = false;
  if (c.peek() == '-') {
    negate = true;
    ++c.pos;
  } else if (c.peek() == '+') {
    ++c.pos;
  }
  while (true) {
    c.skipWs();
    if (c.peek() == 'O') {
      ++c.pos;
      if (!c.consume('(')) c.err("expected '(' after O");
      c.skipWs();
      if (!c.consume('t')) c.err("expected t in O(t^...)");
      if (!c.consume('^')) c.err("expected '^' in O(t^...)");
      prec = parseExp(c, ramificationBound);
      c.skipWs();
      if (!c.consume(')')) c.err("expected ')' closing O(...)");
      sawTail = true;
      break;
    }
    auto term = parseTerm(c, ramificationBound);
    if (negate) term.coef = -term.coef;
    terms.push_back(term);
    c.skipWs();
    if (c.consume('+')) {
      negate = false;
    } else if (c.consume('-')) {
      negate = true;
    } else {
      break;
    }
  }
  c.skipWs();
  if (!c.done()) c.err("trailing input after series");
  (void)sawTail;
  return CSeries::make(std::move(terms), prec, tol);
}

std::string printSeries(const CSeries& s, int digits) {
  std::string out;
  bool first = true;
  for (const auto& t : s.terms()) {
    Scalar c = t.coef;
    bool negReal = (c.imag() == 0.0 && c.real() < 0.0);
    Scalar shown = negReal ? -c : c;
    if (first) {
      if (negReal) out += "-";
      first = false;
    } else {
      out += negReal ? " - " : " + ";
    }
    bool unitCoef = (shown == Scalar(1.0));
    bool needsParens = shown.real() != 0.0 && shown.imag() != 0.0;
    std::string coefStr = formatComplex(shown, digits);
    if (needsParens) coefStr = "(" + coefStr + ")";

    if (t.exp == ExpQ(0)) {
      out += coefStr;
    } else {
      std::string tpart = (t.exp == ExpQ(1)) ? "t" : ("t^" + t.exp.grammarStr());
      out += unitCoef ? tpart : coefStr + "*" + tpart;
    }
  }
  if (first) out += "0";
  out += " + O(t^" + s.prec().grammarStr() + ")";
  return out;
}

}  // namespace berkline
