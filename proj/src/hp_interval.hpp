#pragma once

// Minimal MPFR-backed interval type used only to build point tables of the
// Legendre family and to certify Gauss nodes. The three-term recurrence run
// in binary64 interval arithmetic overestimates by roughly (1+sqrt 2)^n, so
// the tables are computed here at a precision that absorbs that growth and
// then rounded outward to binary64 intervals.

#include <mpfr.h>

#include <utility>

#include "ellipcert/interval.hpp"

namespace ellipcert::detail {

class HpInterval {
 public:
  explicit HpInterval(mpfr_prec_t prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  HpInterval(mpfr_prec_t prec, double x) : HpInterval(prec) { set(x); }
  HpInterval(const HpInterval& o) : HpInterval(mpfr_get_prec(o.lo_)) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  HpInterval& operator=(const HpInterval& o) {
    if (this != &o) {
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }
  ~HpInterval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }

  void set(double x) {
    mpfr_set_d(lo_, x, MPFR_RNDD);
    mpfr_set_d(hi_, x, MPFR_RNDU);
  }
  void set_bounds(const mpfr_t lo, const mpfr_t hi) {
    mpfr_set(lo_, lo, MPFR_RNDD);
    mpfr_set(hi_, hi, MPFR_RNDU);
  }

  mpfr_ptr lo() { return lo_; }
  mpfr_ptr hi() { return hi_; }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }

  /// Outward rounding to a binary64 interval.
  Interval to_interval() const {
    return Interval(mpfr_get_d(lo_, MPFR_RNDD), mpfr_get_d(hi_, MPFR_RNDU));
  }

  // r = a + b
  static void add(HpInterval& r, const HpInterval& a, const HpInterval& b) {
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  }
  // r = a - b
  static void sub(HpInterval& r, const HpInterval& a, const HpInterval& b) {
    HpInterval t(r.prec());
    mpfr_sub(t.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(t.hi_, a.hi_, b.lo_, MPFR_RNDU);
    r = t;
  }
  // r = a * b (r may alias a or b)
  static void mul(HpInterval& r, const HpInterval& a, const HpInterval& b) {
    const mpfr_prec_t p = r.prec();
    mpfr_t t, lo, hi;
    mpfr_inits2(p, t, lo, hi, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_inf(lo, 1);
    mpfr_set_inf(hi, -1);
    mpfr_srcptr as[2] = {a.lo_, a.hi_};
    mpfr_srcptr bs[2] = {b.lo_, b.hi_};
    for (auto x : as) {
      for (auto y : bs) {
        mpfr_mul(t, x, y, MPFR_RNDD);
        mpfr_min(lo, lo, t, MPFR_RNDD);
        mpfr_mul(t, x, y, MPFR_RNDU);
        mpfr_max(hi, hi, t, MPFR_RNDU);
      }
    }
    mpfr_set(r.lo_, lo, MPFR_RNDD);
    mpfr_set(r.hi_, hi, MPFR_RNDU);
    mpfr_clears(t, lo, hi, static_cast<mpfr_ptr>(nullptr));
  }
  // r = a / b, 0 not in b (r may alias a or b)
  static void div(HpInterval& r, const HpInterval& a, const HpInterval& b) {
    const mpfr_prec_t p = r.prec();
    mpfr_t t, lo, hi;
    mpfr_inits2(p, t, lo, hi, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_inf(lo, 1);
    mpfr_set_inf(hi, -1);
    mpfr_srcptr as[2] = {a.lo_, a.hi_};
    mpfr_srcptr bs[2] = {b.lo_, b.hi_};
    for (auto x : as) {
      for (auto y : bs) {
        mpfr_div(t, x, y, MPFR_RNDD);
        mpfr_min(lo, lo, t, MPFR_RNDD);
        mpfr_div(t, x, y, MPFR_RNDU);
        mpfr_max(hi, hi, t, MPFR_RNDU);
      }
    }
    mpfr_set(r.lo_, lo, MPFR_RNDD);
    mpfr_set(r.hi_, hi, MPFR_RNDU);
    mpfr_clears(t, lo, hi, static_cast<mpfr_ptr>(nullptr));
  }
  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
  // r = a * k for a nonnegative integer-valued double k
  static void mul_scalar(HpInterval& r, const HpInterval& a, double k) {
    mpfr_mul_d(r.lo_, a.lo_, k, MPFR_RNDD);
    mpfr_mul_d(r.hi_, a.hi_, k, MPFR_RNDU);
  }
  // r = a / k for k > 0
  static void div_scalar(HpInterval& r, const HpInterval& a, double k) {
    mpfr_div_d(r.lo_, a.lo_, k, MPFR_RNDD);
    mpfr_div_d(r.hi_, a.hi_, k, MPFR_RNDU);
  }
  // r = a +- e, e >= 0 given as (upward-rounded) mpfr value
  static void widen(HpInterval& r, const HpInterval& a, mpfr_srcptr e) {
    mpfr_sub(r.lo_, a.lo_, e, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, e, MPFR_RNDU);
  }

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace ellipcert::detail
