#pragma once

// Closed binary64 intervals with outward rounding.
//
// Rounding is done without touching the FPU rounding mode: every operation is
// evaluated in round-to-nearest, the exact rounding error is recovered with an
// error-free transformation (TwoSum / FMA), and the endpoint is moved one ulp
// outward only when the result was inexact. Exact results therefore stay
// exact, and all functions are pure and thread-safe.

#include <iosfwd>
#include <string>

namespace ellipcert {

namespace rounding {

double next_up(double x);
double next_down(double x);

double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);

}  // namespace rounding

class Interval {
 public:
  constexpr Interval() = default;
  /// Degenerate interval [x, x]. Throws NonFinite for inf/nan.
  Interval(double x);  // NOLINT(google-explicit-constructor): point promotion is intended
  Interval(double lo, double hi);

  /// (-inf, +inf); only for diagnostics, never accepted by arithmetic checks.
  static Interval entire();

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Midpoint rounded to nearest; always lies inside the interval.
  double mid() const;
  /// Radius about mid(), rounded up, so [mid-rad, mid+rad] contains *this.
  double rad() const;
  double width() const;  // rounded up

  bool is_point() const { return lo_ == hi_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend Interval operator-(const Interval& a) { return Interval::raw(-a.hi_, -a.lo_); }
  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  /// Construct without validation. Callers guarantee lo <= hi.
  static Interval raw(double lo, double hi) {
    Interval r;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval sqr(const Interval& a);
Interval pow_int(const Interval& a, unsigned k);
Interval sqrt(const Interval& a);
Interval abs(const Interval& a);
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);
/// Enclosure of max(x, 0) over x in a.
Interval positive_part(const Interval& a);
/// Enclosure of a^(1/q) for a >= 0 and integer q >= 1.
Interval root(const Interval& a, unsigned q);

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);
inline bool contains(const Interval& a, double x) { return a.contains(x); }
/// max(|lo|, |hi|)
double mag(const Interval& a);
/// min |x| over x in a
double mig(const Interval& a);
inline double width(const Interval& a) { return a.width(); }

/// Enclosure of pi, one ulp wide.
Interval pi_enclosure();

/// Outward enclosure of the exact value of a decimal string ("0.1", "-2.5e-3").
/// Throws ParseError on malformed input or values outside the binary64 range.
Interval from_decimal(const std::string& s);
/// Decimal string with `digits` significant digits that is >= a.hi().
std::string to_decimal_upper(const Interval& a, int digits);
/// Decimal string with `digits` significant digits that is <= a.lo().
std::string to_decimal_lower(const Interval& a, int digits);

std::ostream& operator<<(std::ostream& os, const Interval& a);

}  // namespace ellipcert
