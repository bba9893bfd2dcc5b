#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "berkline/errors.hpp"

namespace berkline {

// Exact rational exponents. Arithmetic is overflow-checked; values are kept
// reduced with a positive denominator.
class ExpQ {
 public:
  constexpr ExpQ() = default;
  ExpQ(std::int64_t n) : n_(n) {}
  ExpQ(std::int64_t n, std::int64_t d) : n_(n), d_(d) { reduce(); }

  std::int64_t num() const { return n_; }
  std::int64_t den() const { return d_; }
  bool isInteger() const { return d_ == 1; }

  friend ExpQ operator+(const ExpQ& a, const ExpQ& b) {
    return fromI128(i128(a.n_) * b.d_ + i128(b.n_) * a.d_, i128(a.d_) * b.d_);
  }
  friend ExpQ operator-(const ExpQ& a, const ExpQ& b) {
    return fromI128(i128(a.n_) * b.d_ - i128(b.n_) * a.d_, i128(a.d_) * b.d_);
  }
  friend ExpQ operator*(const ExpQ& a, const ExpQ& b) {
    return fromI128(i128(a.n_) * b.n_, i128(a.d_) * b.d_);
  }
  friend ExpQ operator*(std::int64_t k, const ExpQ& a) { return fromI128(i128(k) * a.n_, a.d_); }
  ExpQ operator-() const {
    ExpQ r;
    r.n_ = -n_;
    r.d_ = d_;
    return r;
  }

  friend bool operator==(const ExpQ& a, const ExpQ& b) { return a.n_ == b.n_ && a.d_ == b.d_; }
  friend bool operator!=(const ExpQ& a, const ExpQ& b) { return !(a == b); }
  friend bool operator<(const ExpQ& a, const ExpQ& b) {
    return i128(a.n_) * b.d_ < i128(b.n_) * a.d_;
  }
  friend bool operator<=(const ExpQ& a, const ExpQ& b) { return a < b || a == b; }
  friend bool operator>(const ExpQ& a, const ExpQ& b) { return b < a; }
  friend bool operator>=(const ExpQ& a, const ExpQ& b) { return b <= a; }

  double toDouble() const { return double(n_) / double(d_); }
  std::string str() const { return std::to_string(n_) + "/" + std::to_string(d_); }
  // Grammar form: "3", or "(1/2)" when fractional.
  std::string grammarStr() const {
    if (d_ == 1) return std::to_string(n_);
    return "(" + std::to_string(n_) + "/" + std::to_string(d_) + ")";
  }

  static ExpQ min(const ExpQ& a, const ExpQ& b) { return a < b ? a : b; }
  static ExpQ max(const ExpQ& a, const ExpQ& b) { return a < b ? b : a; }

 private:
  using i128 = __int128;

  static ExpQ fromI128(i128 n, i128 d) {
    if (d == 0) fail(Errc::InvalidArgument, "rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      fail(Errc::Overflow, "rational exponent overflow");
    ExpQ r;
    r.n_ = std::int64_t(n);
    r.d_ = std::int64_t(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void reduce() {
    ExpQ r = fromI128(n_, d_);
    n_ = r.n_;
    d_ = r.d_;
  }

  std::int64_t n_ = 0;
  std::int64_t d_ = 1;
};

}  // namespace berkline
