#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "vident/errors.hpp"

namespace vident {

// Exact rational number kept in canonical form: gcd-reduced, denominator
// positive. Equal values always compare equal and render identically.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design

  Rational(int64_t numerator, int64_t denominator) {
    if (denominator == 0) throw DataError("rational with zero denominator");
    if (denominator < 0) {
      numerator = checked_negate(numerator);
      denominator = checked_negate(denominator);
    }
    int64_t g = std::gcd(numerator, denominator);
    if (g > 1) {
      numerator /= g;
      denominator /= g;
    }
    num_ = numerator;
    den_ = denominator;
  }

  int64_t numerator() const { return num_; }
  int64_t denominator() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_negative() const { return num_ < 0; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DataError("rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_,
                     static_cast<__int128>(a.den_) * b.num_);
  }

  Rational abs() const { return num_ < 0 ? Rational(checked_negate(num_), den_) : *this; }

  // Largest integer k with k <= *this.
  int64_t floor() const {
    int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  // Canonical text form: integers as plain digits, other values as the
  // reduced fraction "p/q" while q <= 64, otherwise a 6-significant-digit
  // decimal. One rendering per value.
  std::string canonical() const {
    if (den_ == 1) return std::to_string(num_);
    if (den_ <= 64) return std::to_string(num_) + "/" + std::to_string(den_);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", to_double());
    return buf;
  }

  uint64_t hash() const {
    uint64_t h = static_cast<uint64_t>(num_) * 0x9e3779b97f4a7c15ull;
    return h ^ (static_cast<uint64_t>(den_) + (h << 6) + (h >> 2));
  }

 private:
  static int64_t checked_negate(int64_t v) {
    if (v == INT64_MIN) throw DataError("rational overflow");
    return -v;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw DataError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) throw DataError("rational overflow");
    Rational r;
    r.num_ = static_cast<int64_t>(n);
    r.den_ = static_cast<int64_t>(d);
    return r;
  }

  int64_t num_;
  int64_t den_;
};

// Parses "2", "-7", "3/2", "18/2", "1.5", ".25", "-0.125". Returns nothing
// for anything else (including zero denominators and out-of-range digits).
inline std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  size_t i = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    i = 1;
  }
  auto read_digits = [&](int64_t& out, size_t max_digits) -> size_t {
    size_t start = i;
    int64_t v = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      if (i - start >= max_digits) return 0;
      v = v * 10 + (text[i] - '0');
      ++i;
    }
    if (i == start) return 0;
    out = v;
    return i - start;
  };

  int64_t whole = 0;
  size_t whole_digits = 0;
  if (i < text.size() && text[i] != '.') {
    whole_digits = read_digits(whole, 18);
    if (whole_digits == 0) return std::nullopt;
  }
  if (i == text.size()) {
    return Rational(negative ? -whole : whole);
  }
  if (text[i] == '/') {
    ++i;
    int64_t den = 0;
    if (read_digits(den, 18) == 0 || i != text.size() || den == 0) return std::nullopt;
    return Rational(negative ? -whole : whole, den);
  }
  if (text[i] == '.') {
    ++i;
    size_t frac_start = i;
    int64_t frac = 0;
    size_t frac_digits = read_digits(frac, 17);
    if ((frac_digits == 0 && whole_digits == 0) || i != text.size()) return std::nullopt;
    if (frac_digits == 0 && frac_start != text.size()) return std::nullopt;
    int64_t scale = 1;
    for (size_t k = 0; k < frac_digits; ++k) scale *= 10;
    if (whole > (INT64_MAX - frac) / scale) return std::nullopt;
    int64_t num = whole * scale + frac;
    return Rational(negative ? -num : num, scale);
  }
  return std::nullopt;
}

}  // namespace vident

template <>
struct std::hash<vident::Rational> {
  size_t operator()(const vident::Rational& r) const noexcept {
    return static_cast<size_t>(r.hash());
  }
};
