#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace schedlp {

/// Exact rational number on 64-bit integers. Always stored normalized
/// (gcd(num, den) == 1, den > 0). Intermediate products run in 128 bits;
/// results that do not fit back into 64 bits throw std::overflow_error.
/// Instances in this library are desk scale, so overflow indicates a bug
/// rather than a capacity limit.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
    __int128 d = i128(a.den_) * b.den_;
    return from128(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
    __int128 d = i128(a.den_) * b.den_;
    return from128(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// "num/den", or just "num" when the value is integral.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "num" or "num/den". Throws std::invalid_argument on junk.
  static Rational parse(const std::string& text) {
    std::size_t slash = text.find('/');
    try {
      if (slash == std::string::npos) {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return Rational(v);
      }
      std::size_t p1 = 0, p2 = 0;
      std::string ns = text.substr(0, slash), ds = text.substr(slash + 1);
      std::int64_t n = std::stoll(ns, &p1);
      std::int64_t d = std::stoll(ds, &p2);
      if (p1 != ns.size() || p2 != ds.size()) throw std::invalid_argument("trailing characters");
      return Rational(n, d);
    } catch (const std::exception&) {
      throw std::invalid_argument("Rational: cannot parse '" + text + "'");
    }
  }

private:
  static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

  static Rational from128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) {
      throw std::overflow_error("Rational: value exceeds 64-bit range");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_;
  std::int64_t den_;
};

inline Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace schedlp
