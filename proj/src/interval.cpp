#include "ellipcert/interval.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "ellipcert/error.hpp"

namespace ellipcert {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivByZeroInterval: return "DivByZeroInterval";
    case ErrorKind::NegativeSqrt: return "NegativeSqrt";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::QuadratureCertFail: return "QuadratureCertFail";
    case ErrorKind::NonPolynomialIntegrand: return "NonPolynomialIntegrand";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::EnclosureFail: return "EnclosureFail";
    case ErrorKind::NotCoercive: return "NotCoercive";
    case ErrorKind::PossiblySingular: return "PossiblySingular";
    case ErrorKind::KantorovichFail: return "KantorovichFail";
    case ErrorKind::StrategyInapplicable: return "StrategyInapplicable";
    case ErrorKind::ConstantUnavailable: return "ConstantUnavailable";
    case ErrorKind::Assumption4Unverified: return "Assumption4Unverified";
    case ErrorKind::Mu1NotPositive: return "Mu1NotPositive";
    case ErrorKind::SupersetDoesNotCover: return "SupersetDoesNotCover";
    case ErrorKind::Indeterminate: return "Indeterminate";
    case ErrorKind::NoPositiveSolution: return "NoPositiveSolution";
  }
  return "Unknown";
}

namespace rounding {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude FMA-recovered error terms may underflow; widen blindly.
constexpr double kTiny = 0x1p-960;

void check_finite(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "interval endpoint overflow");
}

// err = (a + b) - s exactly (TwoSum).
double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

}  // namespace

double next_up(double x) { return std::nextafter(x, kInf); }
double next_down(double x) { return std::nextafter(x, -kInf); }

double add_down(double a, double b) {
  const double s = a + b;
  check_finite(s);
  return two_sum_err(a, b, s) < 0.0 ? next_down(s) : s;
}

double add_up(double a, double b) {
  const double s = a + b;
  check_finite(s);
  return two_sum_err(a, b, s) > 0.0 ? next_up(s) : s;
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
  const double p = a * b;
  check_finite(p);
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::fabs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}

double mul_up(double a, double b) {
  const double p = a * b;
  check_finite(p);
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::fabs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

double div_down(double a, double b) {
  const double q = a / b;
  check_finite(q);
  if (a == 0.0) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
  // a - q*b has the sign of (a/b - q) * b
  const double r = std::fma(-q, b, a);
  const double s = (b > 0.0) ? r : -r;
  return s < 0.0 ? next_down(q) : q;
}

double div_up(double a, double b) {
  const double q = a / b;
  check_finite(q);
  if (a == 0.0) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  const double r = std::fma(-q, b, a);
  const double s = (b > 0.0) ? r : -r;
  return s > 0.0 ? next_up(q) : q;
}

double sqrt_down(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0) return 0.0;
  if (a < kTiny) return next_down(s);
  return std::fma(-s, s, a) < 0.0 ? next_down(s) : s;
}

double sqrt_up(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0) return 0.0;
  if (a < kTiny) return next_up(s);
  return std::fma(-s, s, a) > 0.0 ? next_up(s) : s;
}

}  // namespace rounding

using namespace rounding;

Interval::Interval(double x) : lo_(x), hi_(x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "non-finite point interval");
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::NonFinite, "non-finite interval endpoint");
  if (!(lo <= hi)) throw Error(ErrorKind::InvalidArgument, "interval with lo > hi");
}

Interval Interval::entire() {
  return raw(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

double Interval::mid() const {
  if (lo_ == hi_) return lo_;
  const double m = 0.5 * lo_ + 0.5 * hi_;
  return std::clamp(m, lo_, hi_);
}

double Interval::rad() const {
  const double m = mid();
  return std::max(sub_up(m, lo_), sub_up(hi_, m));
}

double Interval::width() const { return sub_up(hi_, lo_); }

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

Interval operator+(const Interval& a, const Interval& b) {
  return Interval::raw(add_down(a.lo_, b.lo_), add_up(a.hi_, b.hi_));
}

Interval operator-(const Interval& a, const Interval& b) {
  return Interval::raw(sub_down(a.lo_, b.hi_), sub_up(a.hi_, b.lo_));
}

Interval operator*(const Interval& a, const Interval& b) {
  const double lo = std::min({mul_down(a.lo_, b.lo_), mul_down(a.lo_, b.hi_),
                              mul_down(a.hi_, b.lo_), mul_down(a.hi_, b.hi_)});
  const double hi = std::max({mul_up(a.lo_, b.lo_), mul_up(a.lo_, b.hi_),
                              mul_up(a.hi_, b.lo_), mul_up(a.hi_, b.hi_)});
  return Interval::raw(lo, hi);
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw Error(ErrorKind::DivByZeroInterval, "divisor contains zero");
  const double lo = std::min({div_down(a.lo_, b.lo_), div_down(a.lo_, b.hi_),
                              div_down(a.hi_, b.lo_), div_down(a.hi_, b.hi_)});
  const double hi = std::max({div_up(a.lo_, b.lo_), div_up(a.lo_, b.hi_),
                              div_up(a.hi_, b.lo_), div_up(a.hi_, b.hi_)});
  return Interval::raw(lo, hi);
}

Interval sqr(const Interval& a) { return pow_int(a, 2); }

namespace {

// x^k for x >= 0, rounded in the requested direction (monotone in x).
double pow_nonneg(double x, unsigned k, bool up) {
  double r = 1.0;
  double base = x;
  while (k) {
    if (k & 1U) r = up ? mul_up(r, base) : mul_down(r, base);
    k >>= 1U;
    if (k) base = up ? mul_up(base, base) : mul_down(base, base);
  }
  return r;
}

// Directed x^k for arbitrary sign of x.
double pow_dir(double x, unsigned k, bool up) {
  if (x >= 0.0) return pow_nonneg(x, k, up);
  const double m = pow_nonneg(-x, k, (k % 2 == 0) ? up : !up);
  return (k % 2 == 0) ? m : -m;
}

}  // namespace

Interval pow_int(const Interval& a, unsigned k) {
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  if (k % 2 == 1 || a.lo() >= 0.0) return Interval::raw(pow_dir(a.lo(), k, false), pow_dir(a.hi(), k, true));
  if (a.hi() <= 0.0) return Interval::raw(pow_nonneg(-a.hi(), k, false), pow_nonneg(-a.lo(), k, true));
  return Interval::raw(0.0, pow_nonneg(mag(a), k, true));
}

Interval sqrt(const Interval& a) {
  if (a.lo() < 0.0) throw Error(ErrorKind::NegativeSqrt, "sqrt of interval with negative part");
  return Interval::raw(sqrt_down(a.lo()), sqrt_up(a.hi()));
}

namespace {

double root_down(double x, unsigned q) {
  if (x <= 0.0) return 0.0;
  double r = std::pow(x, 1.0 / q);
  // Step down by a growing amount; near underflow single ulps would take too long.
  for (double step = 0.0; pow_nonneg(r, q, true) > x;) {
    step = step == 0.0 ? next_up(0.0) + std::fabs(r) * 0x1p-52 : 2 * step;
    r = std::max(0.0, sub_down(r, step));
  }
  return r;
}

double root_up(double x, unsigned q) {
  if (x <= 0.0) return 0.0;
  double r = std::pow(x, 1.0 / q);
  for (double step = 0.0; pow_nonneg(r, q, false) < x;) {
    step = step == 0.0 ? next_up(0.0) + std::fabs(r) * 0x1p-52 : 2 * step;
    r = add_up(r, step);
  }
  return r;
}

}  // namespace

Interval root(const Interval& a, unsigned q) {
  if (q == 0) throw Error(ErrorKind::InvalidArgument, "zeroth root");
  if (a.lo() < 0.0) throw Error(ErrorKind::NegativeSqrt, "root of interval with negative part");
  if (q == 1) return a;
  if (q == 2) return sqrt(a);
  return Interval::raw(root_down(a.lo(), q), root_up(a.hi(), q));
}

Interval abs(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return Interval::raw(0.0, mag(a));
}

Interval max(const Interval& a, const Interval& b) {
  return Interval::raw(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval min(const Interval& a, const Interval& b) {
  return Interval::raw(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Interval positive_part(const Interval& a) { return max(a, Interval(0.0)); }

Interval hull(const Interval& a, const Interval& b) {
  return Interval::raw(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw Error(ErrorKind::EmptyIntersection, "intervals are disjoint");
  return Interval::raw(lo, hi);
}

double mag(const Interval& a) { return std::max(std::fabs(a.lo()), std::fabs(a.hi())); }

double mig(const Interval& a) {
  if (a.contains_zero()) return 0.0;
  return std::min(std::fabs(a.lo()), std::fabs(a.hi()));
}

Interval pi_enclosure() {
  // 0x1.921fb54442d18p+1 is the binary64 value nearest to pi and lies below it.
  constexpr double kPiLow = 0x1.921fb54442d18p+1;
  return Interval::raw(kPiLow, next_up(kPiLow));
}

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_directed(const std::string& s, mpfr_rnd_t rnd) {
  Mpfr x(256);
  char* end = nullptr;
  mpfr_strtofr(x.v, s.c_str(), &end, 10, rnd);
  if (end == s.c_str() || *end != '\0' || !mpfr_number_p(x.v))
    throw Error(ErrorKind::ParseError, "malformed decimal '" + s + "'");
  const double d = mpfr_get_d(x.v, rnd);
  if (!std::isfinite(d)) throw Error(ErrorKind::ParseError, "decimal out of range '" + s + "'");
  return d;
}

bool is_decimal_syntax(const std::string& s) {
  // [+-]digits[.digits][(e|E)[+-]digits]; rejects hex, inf, nan
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  }
  if (digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t ed = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++ed;
    if (ed == 0) return false;
  }
  return i == s.size();
}

std::string format_directed(double x, int digits, mpfr_rnd_t rnd) {
  if (digits < 1) throw Error(ErrorKind::InvalidArgument, "digits must be >= 1");
  Mpfr v(53);
  mpfr_set_d(v.v, x, MPFR_RNDN);
  char* out = nullptr;
  const char* fmt = (rnd == MPFR_RNDU) ? "%.*RUe" : "%.*RDe";
  mpfr_asprintf(&out, fmt, digits - 1, v.v);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

}  // namespace

Interval from_decimal(const std::string& raw_text) {
  const std::string s = trim(raw_text);
  if (!is_decimal_syntax(s)) throw Error(ErrorKind::ParseError, "malformed decimal '" + raw_text + "'");
  return Interval::raw(parse_directed(s, MPFR_RNDD), parse_directed(s, MPFR_RNDU));
}

std::string to_decimal_upper(const Interval& a, int digits) { return format_directed(a.hi(), digits, MPFR_RNDU); }

std::string to_decimal_lower(const Interval& a, int digits) { return format_directed(a.lo(), digits, MPFR_RNDD); }

std::ostream& operator<<(std::ostream& os, const Interval& a) {
  return os << '[' << to_decimal_lower(a, 17) << ", " << to_decimal_upper(a, 17) << ']';
}

}  // namespace ellipcert
