#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace isched {

// Exact rational on 64 bits. Always normalized: den > 0, gcd(|num|, den) = 1.
// Intermediates go through __int128; if a result does not fit back into
// int64 after reduction, the operation throws. Job weights and solution
// values stay exact this way instead of accumulating float error.
class Rat {
 public:
  constexpr Rat() : num_(0), den_(1) {}
  constexpr Rat(std::int64_t n) : num_(n), den_(1) {}
  Rat(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    __int128 nn = n, dd = d;
    if (dd < 0) { nn = -nn; dd = -dd; }
    assign_reduced(nn, dd);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat::from128((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                        (__int128)a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat::from128((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                        (__int128)a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat::from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    __int128 n = (__int128)a.num_ * b.den_;
    __int128 d = (__int128)a.den_ * b.num_;
    if (d < 0) { n = -n; d = -d; }
    return Rat::from128(n, d);
  }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  double to_double() const { return (double)num_ / (double)den_; }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "n" or "n/d".
  static Rat parse(std::string_view s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string_view::npos)
        return Rat(std::stoll(std::string(s)));
      std::int64_t n = std::stoll(std::string(s.substr(0, slash)));
      std::int64_t d = std::stoll(std::string(s.substr(slash + 1)));
      return Rat(n, d);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("Rat: cannot parse '" + std::string(s) + "'");
    } catch (const std::out_of_range&) {
      throw std::overflow_error("Rat: literal out of range '" + std::string(s) + "'");
    }
  }

 private:
  static Rat from128(__int128 n, __int128 d) {
    Rat r;
    r.assign_reduced(n, d);
    return r;
  }

  void assign_reduced(__int128 n, __int128 d) {
    unsigned __int128 un = n < 0 ? (unsigned __int128)(-n) : (unsigned __int128)n;
    unsigned __int128 ud = (unsigned __int128)d;
    unsigned __int128 g = gcd128(un, ud);
    if (g > 1) { n /= (__int128)g; d /= (__int128)g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rat: overflow after reduction");
    num_ = (std::int64_t)n;
    den_ = (std::int64_t)d;
  }

  static unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) { auto t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace isched
